#pragma once

#include <stdexcept>
#include <string>

namespace aoi {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
    invalid_argument = 1,
    no_convergence,
    truncation,
    non_monotone,
    bracket,
    parse,
    io,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace aoi
