#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coderec {

enum class ErrorCode {
  kMalformedRecord,
  kEncodingError,
  kEmptyText,
  kIoError,
  kBadMagic,
  kVersionUnsupported,
  kTruncatedPayload,
  kIdCountMismatch,
  kIndexOutOfRange,
  kZeroVector,
  kZeroQuery,
  kDimensionMismatch,
  kEmptyStore,
  kEmptyRun,
  kEmptyInput,
  kInvalidArgument,
  kParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kEncodingError: return "EncodingError";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kIdCountMismatch: return "IdCountMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kZeroQuery: return "ZeroQuery";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyStore: return "EmptyStore";
    case ErrorCode::kEmptyRun: return "EmptyRun";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; what()
/// is prefixed with the code name so CLI diagnostics stay one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace coderec
