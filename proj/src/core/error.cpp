#include "error.hpp"

namespace scp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularGram: return "SingularGram";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
    case ErrorKind::InvalidPenalty: return "InvalidPenalty";
    case ErrorKind::EmptyPath: return "EmptyPath";
    case ErrorKind::AllUnbounded: return "AllUnbounded";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingResponse: return "MissingResponse";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidPenalty:
      return ErrorClass::Usage;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ParseError:
    case ErrorKind::MissingResponse:
    case ErrorKind::NonNumericCell:
    case ErrorKind::Io:
      return ErrorClass::Data;
    case ErrorKind::SingularGram:
    case ErrorKind::DegenerateDesign:
    case ErrorKind::EmptyPath:
    case ErrorKind::AllUnbounded:
      return ErrorClass::Numerical;
  }
  return ErrorClass::Numerical;
}

}  // namespace scp
