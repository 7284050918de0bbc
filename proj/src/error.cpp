#include "bae/error.hpp"

namespace bae {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::DegenerateConditioning: return "degenerate-conditioning";
    case ErrorKind::GridTooNarrow: return "grid-too-narrow";
    case ErrorKind::TruncationOverflow: return "truncation-overflow";
    case ErrorKind::SetupMismatch: return "setup-mismatch";
    case ErrorKind::EmptyRecords: return "empty-records";
    case ErrorKind::InvalidConfig: return "invalid-config";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace bae
