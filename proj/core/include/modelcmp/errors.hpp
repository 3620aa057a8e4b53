#ifndef MODELCMP_ERRORS_HPP
#define MODELCMP_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace modelcmp {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (bad CSV, incomplete grid,
/// out-of-range metric values, unknown identifiers). Maps to exit code 2.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Bad configuration (flags, config file, parameter ranges). Exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Filesystem / stream failures. Exit code 3.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// The naive method found an exact tie for the best model and has no
/// principled tie-breaker; the tied model ids are carried along.
class TieError : public Error {
 public:
  TieError(const std::string& msg, std::vector<std::string> tied)
      : Error(msg), tied_models(std::move(tied)) {}
  std::vector<std::string> tied_models;
};

/// The Friedman omnibus test retained H0, so the post-hoc family is
/// undefined. Callers that want the family anyway must force the post-hoc.
class OmnibusRetainedError : public Error {
 public:
  explicit OmnibusRetainedError(const std::string& msg) : Error(msg) {}
};

}  // namespace modelcmp

#endif
