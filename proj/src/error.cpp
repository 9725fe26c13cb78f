#include "relforge/error.hpp"

namespace relforge {

const char* to_string(DataErrorKind kind) {
  switch (kind) {
    case DataErrorKind::kParse: return "parse_error";
    case DataErrorKind::kMissingField: return "missing_field";
    case DataErrorKind::kInvalidLabel: return "invalid_label";
    case DataErrorKind::kDuplicateId: return "duplicate_id";
    case DataErrorKind::kOutOfRange: return "out_of_range";
    case DataErrorKind::kMalformedPath: return "malformed_path";
    case DataErrorKind::kContractViolation: return "contract_violation";
    case DataErrorKind::kIo: return "io_error";
  }
  return "unknown";
}

DataError::DataError(DataErrorKind kind, const std::string& message,
                     std::size_t line)
    : Error(line == 0 ? message
                      : "line " + std::to_string(line) + ": " + message),
      kind_(kind),
      line_(line) {}

}  // namespace relforge
