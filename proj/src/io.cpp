#include "sqr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqr/error.hpp"

namespace sqr {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonUniformKernel: return "NonUniformKernel";
    case Errc::DegenerateBand: return "DegenerateBand";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::AllUnpenalized: return "AllUnpenalized";
    case Errc::MissingTarget: return "MissingTarget";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::Io: return "Io";
    case Errc::TooManyFailures: return "TooManyFailures";
  }
  return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    field = trim(field);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset parse_dataset(std::istream& in, const std::string& target, const std::string& source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      header = split_csv(line);
      break;
    }
  }
  if (header.empty()) throw DataError(Errc::EmptyFile, source + ": file is empty");

  std::size_t target_col = header.size();
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == target) target_col = k;
  }
  if (target_col == header.size()) {
    std::string avail;
    for (const auto& h : header) avail += (avail.empty() ? "" : ", ") + h;
    throw DataError(Errc::MissingTarget,
                    source + ": target column '" + target + "' not found; available columns: " + avail);
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw DataError(Errc::NonNumericCell, source + ": line " + std::to_string(line_no) + " has " +
                                                std::to_string(cells.size()) + " cells, header has " +
                                                std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!parse_number(cells[k], row[k])) {
        throw DataError(Errc::NonNumericCell, source + ": non-numeric or non-finite cell '" + cells[k] +
                                                  "' at row " + std::to_string(rows.size() + 1) + ", column '" +
                                                  header[k] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(Errc::EmptyFile, source + ": no data rows");

  const std::size_t n = rows.size();
  const std::size_t p = header.size();  // intercept + (header.size() - 1) features
  Dataset d;
  d.x = Matrix(n, p);
  d.y.resize(n);
  d.intercept = true;
  d.names.push_back("intercept");
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k != target_col) d.names.push_back(header[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.x(i, 0) = 1.0;
    std::size_t j = 1;
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k == target_col) {
        d.y[i] = rows[i][k];
      } else {
        d.x(i, j++) = rows[i][k];
      }
    }
  }
  return d;
}

Dataset read_dataset(const std::filesystem::path& path, const std::string& target) {
  auto in = open_in(path);
  return parse_dataset(in, target, path.string());
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, const std::string& target) {
  auto out = open_out(path);
  const std::size_t first = data.intercept ? 1 : 0;
  out << target;
  for (std::size_t j = first; j < data.p(); ++j) {
    out << ',' << (j < data.names.size() ? data.names[j] : "x" + std::to_string(j));
  }
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (std::size_t j = first; j < data.p(); ++j) out << ',' << format_double(data.x(i, j));
    out << '\n';
  }
  finish(out, path);
}

void write_coefficients(const std::filesystem::path& path, const CoefficientTable& table) {
  auto out = open_out(path);
  out << "term,coefficient,weight\n";
  for (std::size_t j = 0; j < table.beta.size(); ++j) {
    const std::string term = j < table.terms.size() ? table.terms[j] : "b" + std::to_string(j);
    const double w = j < table.weights.size() ? table.weights[j] : 0.0;
    out << term << ',' << format_double(table.beta[j]) << ',' << format_double(w) << '\n';
  }
  finish(out, path);
}

CoefficientTable read_coefficients(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(Errc::EmptyFile, path.string() + ": file is empty");
  CoefficientTable t;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv(line);
    double b = 0.0, w = 0.0;
    if (cells.size() < 2 || !parse_number(cells[1], b) || (cells.size() > 2 && !parse_number(cells[2], w))) {
      throw DataError(Errc::NonNumericCell, path.string() + ": malformed coefficient row " + std::to_string(row));
    }
    t.terms.push_back(cells[0]);
    t.beta.push_back(b);
    t.weights.push_back(w);
  }
  if (t.beta.empty()) throw DataError(Errc::EmptyFile, path.string() + ": no coefficients");
  return t;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& entries) {
  auto out = open_out(path);
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  finish(out, path);
}

KeyValues read_key_values(const std::filesystem::path& path) {
  auto in = open_in(path);
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) continue;
    kv.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  return kv;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace sqr
