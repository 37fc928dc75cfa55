#include "qdesign/errors.hpp"

namespace qdesign {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNoDensity: return "NoDensity";
    case ErrorKind::kNotDifferentiable: return "NotDifferentiable";
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kInvalidSlopes: return "InvalidSlopes";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kDegenerateProbability: return "DegenerateProbability";
    case ErrorKind::kOptimizationFailure: return "OptimizationFailure";
    case ErrorKind::kInadmissibleIterate: return "InadmissibleIterate";
    case ErrorKind::kInadmissible: return "Inadmissible";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace qdesign
