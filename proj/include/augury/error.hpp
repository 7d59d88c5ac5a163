#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace augury {

/// Failure categories shared by every module.
enum class ErrorKind {
    InvalidParameter,
    InsufficientData,
    EmptyInput,
    EmptySelection,
    Io,
    Schema,
    Format,
    Degenerate,
    Convergence,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid parameter";
        case ErrorKind::InsufficientData: return "insufficient data";
        case ErrorKind::EmptyInput: return "empty input";
        case ErrorKind::EmptySelection: return "empty selection";
        case ErrorKind::Io: return "i/o error";
        case ErrorKind::Schema: return "schema error";
        case ErrorKind::Format: return "format error";
        case ErrorKind::Degenerate: return "degenerate input";
        case ErrorKind::Convergence: return "convergence failure";
    }
    return "error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the category prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) {
        throw Error(kind, what);
    }
}

}  // namespace detail

}  // namespace augury
