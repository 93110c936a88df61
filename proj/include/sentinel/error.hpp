#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentinel {

enum class ErrorCode {
    kMalformedUrl,
    kUnsupportedScheme,
    kInvalidConfig,
    kSchemaError,
    kParseError,
    kDimensionMismatch,
    kInvalidWeights,
    kInvalidScore,
    kSessionClosed,
    kIoError,
    kCorruptJournal,
};

// Machine-readable snake_case name, used in HTTP error bodies and CLI messages.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace sentinel
