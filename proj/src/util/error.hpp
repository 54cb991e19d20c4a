#pragma once

#include <stdexcept>
#include <string>

namespace pdsp {

enum class ErrorCode {
    InvalidArgument,
    Io,
    Generation,
    Execution,
    Training,
    Internal,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the core surface as pdsp::Error; the C API
// translates the code into its status enum.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorCode::Io, msg); }

} // namespace pdsp
