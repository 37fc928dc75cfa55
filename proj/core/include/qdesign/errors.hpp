#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qdesign {

enum class ErrorKind {
  kNoDensity,
  kNotDifferentiable,
  kInvalidParameter,
  kInvalidSlopes,
  kNumericalFailure,
  kDegenerateProbability,
  kOptimizationFailure,
  kInadmissibleIterate,
  kInadmissible,
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type; callers branch on kind() rather than on a class
// hierarchy.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by piecewise_linear() when a prefix-sum or continuity constraint is
// violated. index is the 1-based prefix index (K for the sum constraint).
class InvalidSlopesError : public Error {
 public:
  InvalidSlopesError(std::size_t index, const std::string& what)
      : Error(ErrorKind::kInvalidSlopes, what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace qdesign
