#pragma once

#include <stdexcept>
#include <string>

namespace ssbayes {

/// Bad argument values, malformed priors, dimension mismatches.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Data that cannot be fit (e.g. single-class labels for a two-class model).
class InvalidData : public std::invalid_argument {
 public:
  explicit InvalidData(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Graph queries that name unknown nodes or violate query preconditions.
class InvalidQuery : public std::invalid_argument {
 public:
  explicit InvalidQuery(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed binary or text inputs (bad magic bytes, truncated payloads, ...).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical procedures that did not converge or hit a singular system.
/// `diagnostics` carries whatever state the failing routine could report.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& msg, std::string diagnostics = {})
      : std::runtime_error(msg), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace ssbayes
