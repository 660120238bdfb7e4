#include "lvar/errors.hpp"

namespace lvar {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CyclicLatent: return "CyclicLatent";
    case ErrorKind::NonStationary: return "NonStationary";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::InconsistentRecovery: return "InconsistentRecovery";
    case ErrorKind::NotIdentifiable: return "NotIdentifiable";
    case ErrorKind::AmbiguousDistance: return "AmbiguousDistance";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::ScaleExceeded: return "ScaleExceeded";
  }
  return "Unknown";
}

}  // namespace lvar
