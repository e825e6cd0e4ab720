#include "tpf/error.hpp"

namespace tpf {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorKind::MergeConflict: return "MergeConflict";
    case ErrorKind::NotStronger: return "NotStronger";
    case ErrorKind::NotWeaker: return "NotWeaker";
    case ErrorKind::NonTotalPhi: return "NonTotalPhi";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::NotALoop: return "NotALoop";
    case ErrorKind::PartialT: return "PartialT";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

SourceError::SourceError(ErrorKind kind, int line, int column, const std::string& message)
    : Error(kind, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

} // namespace tpf
