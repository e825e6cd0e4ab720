#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpf {

enum class ErrorKind {
    EmptyDomain,
    SpaceMismatch,
    SpaceTooLarge,
    MergeConflict,
    NotStronger,
    NotWeaker,
    NonTotalPhi,
    InvalidArgument,
    SyntaxError,
    UnknownName,
    TypeError,
    ArityError,
    NotALoop,
    PartialT,
    NotComposable,
    NotInvertible,
    SearchBudgetExceeded,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; callers
// dispatch on kind() rather than on a class hierarchy.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Errors raised while reading DSL source carry a 1-based position. The kind is
// one of SyntaxError, UnknownName or TypeError.
class SourceError : public Error {
public:
    SourceError(ErrorKind kind, int line, int column, const std::string& message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

} // namespace tpf
