#pragma once

#include <stdexcept>
#include <string>

namespace sqr {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  NonUniformKernel,
  DegenerateBand,
  EmptySupport,
  AllUnpenalized,
  MissingTarget,
  NonNumericCell,
  EmptyFile,
  Io,
  TooManyFailures,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised for malformed or non-finite input data.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace sqr
