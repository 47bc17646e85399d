#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace memlogic {

enum class ErrorKind {
    validation,
    syntax,
    version,
    cycle,
    dangling_net,
    arity,
    duplicate,
    overlap,
    gap,
    unknown_terminal,
    uncovered_input,
    unknown_net,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::syntax: return "syntax";
    case ErrorKind::version: return "version";
    case ErrorKind::cycle: return "cycle";
    case ErrorKind::dangling_net: return "dangling-net";
    case ErrorKind::arity: return "arity";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::overlap: return "overlap";
    case ErrorKind::gap: return "gap";
    case ErrorKind::unknown_terminal: return "unknown-terminal";
    case ErrorKind::uncovered_input: return "uncovered-input";
    case ErrorKind::unknown_net: return "unknown-net";
    }
    return "unknown";
}

/// Base error for everything the library reports.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Source location inside a netlist or stimulus text; 1-based, 0 when unknown.
struct Location {
    std::size_t line = 0;
    std::size_t column = 0;
};

class ParseError : public Error {
public:
    ParseError(ErrorKind kind, Location where, const std::string& message)
        : Error(kind, message), where_(where) {}

    [[nodiscard]] Location where() const noexcept { return where_; }

    /// `line:col: error[kind]: message`
    [[nodiscard]] std::string diagnostic() const {
        return std::to_string(where_.line) + ":" + std::to_string(where_.column) + ": error[" +
               std::string(to_string(kind())) + "]: " + what();
    }

private:
    Location where_;
};

}  // namespace memlogic
