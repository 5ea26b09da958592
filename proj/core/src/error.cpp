#include "cyto/error.hpp"

namespace cyto {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid_config";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::ZeroPivot: return "zero_pivot";
    case ErrorKind::SingularMatrix: return "singular_matrix";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::NotConverged: return "not_converged";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace cyto
