#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sqr/error.hpp"
#include "sqr/io.hpp"

using namespace sqr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sqr_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

Errc code_of(const std::string& text, const std::string& target = "y") {
  std::istringstream in(text);
  try {
    parse_dataset(in, target);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return Errc::Io;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("parse with the target in any column") {
    std::istringstream in("a,y,b\n1,2,3\n4,5,6\n");
    const auto d = parse_dataset(in);
    REQUIRE(d.n() == 2);
    REQUIRE(d.p() == 3);
    CHECK(d.names == std::vector<std::string>{"intercept", "a", "b"});
    CHECK(d.y == Vector{2.0, 5.0});
    CHECK(d.x(0, 0) == 1.0);
    CHECK(d.x(1, 1) == 4.0);
    CHECK(d.x(1, 2) == 6.0);
  }

  TEST_CASE("parse errors") {
    CHECK(code_of("a,b\n1,2\n3,4\n") == Errc::MissingTarget);
    CHECK(code_of("a,y\n1,2\nx,4\n") == Errc::NonNumericCell);
    CHECK(code_of("a,y\n1,2\nnan,4\n") == Errc::NonNumericCell);
    CHECK(code_of("a,y\n1,2\n3,inf\n") == Errc::NonNumericCell);
    CHECK(code_of("") == Errc::EmptyFile);
    std::istringstream in("a,b\n1,2\n");
    try {
      parse_dataset(in, "y");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("a, b") != std::string::npos);
    }
    std::istringstream bad("a,y\n1,2\n3,zz\n");
    try {
      parse_dataset(bad, "y");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("y") != std::string::npos);
      CHECK(msg.find("zz") != std::string::npos);
    }
  }

  TEST_CASE("dataset round trip keeps every bit") {
    std::mt19937_64 rng(80);
    auto d = testing::random_dataset(25, 4, rng, Vector{0.1, 1.0 / 3.0, -2.0});
    d.names = {"intercept", "f1", "f2", "f3", "f4"};
    d.y[3] = 1e-300;
    d.x(5, 2) = -123456789.123456789;
    const auto path = scratch("nested/data.csv");
    fs::remove_all(path.parent_path());
    write_dataset(path, d);
    const auto back = read_dataset(path);
    CHECK(back.x == d.x);
    CHECK(back.y == d.y);
    CHECK(back.names == d.names);
  }

  TEST_CASE("format_double is exact") {
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double v = u(rng) * std::pow(10.0, static_cast<double>(i % 40 - 20));
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
  }

  TEST_CASE("coefficient table round trip") {
    CoefficientTable t{{"intercept", "x1", "x2"}, {0.25, -1.0 / 7.0, 0.0}, {0.0, 0.1, 0.1}};
    const auto path = scratch("coef.csv");
    write_coefficients(path, t);
    const auto back = read_coefficients(path);
    CHECK(back.terms == t.terms);
    CHECK(back.beta == t.beta);
    CHECK(back.weights == t.weights);
  }

  TEST_CASE("key-value files") {
    const KeyValues kv{{"tau", "0.3"}, {"kernel", "\"uniform\""}, {"converged", "true"}};
    const auto path = scratch("kv.txt");
    write_key_values(path, kv);
    CHECK(read_key_values(path) == kv);
  }

  TEST_CASE("missing file") {
    CHECK_THROWS_AS(read_dataset(scratch("does-not-exist.csv")), Error);
  }
}
