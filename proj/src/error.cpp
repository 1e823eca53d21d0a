#include "cifeast/error.hpp"

namespace cifeast {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ExactSingular: return "ExactSingular";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularPencilProjection: return "SingularPencilProjection";
    case ErrorKind::PoleCollision: return "PoleCollision";
    case ErrorKind::AllNodesSingular: return "AllNodesSingular";
    case ErrorKind::SubspaceCollapse: return "SubspaceCollapse";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::DenseLimitExceeded: return "DenseLimitExceeded";
    case ErrorKind::BothReductionsIllConditioned: return "BothReductionsIllConditioned";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cifeast
