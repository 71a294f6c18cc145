#pragma once

#include <stdexcept>
#include <string>

namespace dq {

enum class ErrorCode {
    SyntaxError,
    SafetyViolation,
    RecursionDetected,
    MissingRelation,
    SchemaMismatch,
    ValueParseError,
    UnboundBuiltin,
    MissingViewDefinition,
    NonConjunctiveQuery,
    NonMonotoneQuery,
    UninvertibleView,
    BindingViolation,
    DuplicateSource,
    ResolverFailure,
    DomainTooLarge,
    EmptyBase,
    ContainmentViolation,
    InvalidSystem,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::SafetyViolation: return "SafetyViolation";
        case ErrorCode::RecursionDetected: return "RecursionDetected";
        case ErrorCode::MissingRelation: return "MissingRelation";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::ValueParseError: return "ValueParseError";
        case ErrorCode::UnboundBuiltin: return "UnboundBuiltin";
        case ErrorCode::MissingViewDefinition: return "MissingViewDefinition";
        case ErrorCode::NonConjunctiveQuery: return "NonConjunctiveQuery";
        case ErrorCode::NonMonotoneQuery: return "NonMonotoneQuery";
        case ErrorCode::UninvertibleView: return "UninvertibleView";
        case ErrorCode::BindingViolation: return "BindingViolation";
        case ErrorCode::DuplicateSource: return "DuplicateSource";
        case ErrorCode::ResolverFailure: return "ResolverFailure";
        case ErrorCode::DomainTooLarge: return "DomainTooLarge";
        case ErrorCode::EmptyBase: return "EmptyBase";
        case ErrorCode::ContainmentViolation: return "ContainmentViolation";
        case ErrorCode::InvalidSystem: return "InvalidSystem";
    }
    return "UnknownError";
}

/// Library-wide exception. `what()` is "<CodeName>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dq
