#include "sentinel/error.hpp"

namespace sentinel {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kMalformedUrl: return "malformed_url";
        case ErrorCode::kUnsupportedScheme: return "unsupported_scheme";
        case ErrorCode::kInvalidConfig: return "invalid_config";
        case ErrorCode::kSchemaError: return "schema_error";
        case ErrorCode::kParseError: return "parse_error";
        case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
        case ErrorCode::kInvalidWeights: return "invalid_weights";
        case ErrorCode::kInvalidScore: return "invalid_score";
        case ErrorCode::kSessionClosed: return "session_closed";
        case ErrorCode::kIoError: return "io_error";
        case ErrorCode::kCorruptJournal: return "corrupt_journal";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace sentinel
