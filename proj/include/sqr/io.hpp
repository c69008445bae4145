#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqr/objective.hpp"

namespace sqr {

/// Comma-separated values with a header row. The target column is picked by
/// name; every other column is a numeric feature, and an intercept column of
/// ones is prepended. Throws DataError (MissingTarget, NonNumericCell,
/// EmptyFile) or Error(Io).
Dataset read_dataset(const std::filesystem::path& path, const std::string& target = "y");
Dataset parse_dataset(std::istream& in, const std::string& target = "y", const std::string& source = "<input>");

/// Writes `target` followed by the non-intercept columns, 17 significant digits.
void write_dataset(const std::filesystem::path& path, const Dataset& data, const std::string& target = "y");

/// Decimal text that reads back to the same double.
std::string format_double(double v);

struct CoefficientTable {
  std::vector<std::string> terms;
  Vector beta;
  Vector weights;
};

/// CSV with header term,coefficient,weight.
void write_coefficients(const std::filesystem::path& path, const CoefficientTable& table);
CoefficientTable read_coefficients(const std::filesystem::path& path);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// One `key = value` line per entry; string values are quoted so the file
/// also loads as a CLI config.
void write_key_values(const std::filesystem::path& path, const KeyValues& entries);
KeyValues read_key_values(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sqr
