#include "qsurf/error.hpp"

namespace qsurf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid parameter";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::DegenerateObservation: return "degenerate observation";
    case ErrorKind::Decomposition: return "decomposition error";
    case ErrorKind::UnsupportedDimension: return "unsupported dimension";
    case ErrorKind::ContractViolation: return "contract violation";
    case ErrorKind::EmptyDataset: return "empty dataset";
    case ErrorKind::NoTrainableDirections: return "no trainable directions";
    case ErrorKind::SingularCovariance: return "singular covariance";
    case ErrorKind::MissingLevel: return "missing level";
    case ErrorKind::Divergence: return "training divergence";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "file not found or unreadable";
    case ErrorKind::Format: return "format error";
  }
  return "error";
}

}  // namespace qsurf
