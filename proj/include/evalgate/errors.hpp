#pragma once

#include <stdexcept>
#include <string>

namespace evalgate {

// Every recoverable failure in the library is thrown as an EvalError with a
// machine-checkable kind. The detail string is for humans and logs.
enum class ErrorKind {
    missing_field,
    parse_error,
    unknown_event_type,
    inconsistent_input,
    division_by_zero,
    empty_histogram,
    duplicate_task,
    unparseable_answer,
    ambiguous_date,
    not_a_failure_event,
    no_primary_probe,
    unknown_fixture,
    invalid_config,
    io_error,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::missing_field: return "missing_field";
        case ErrorKind::parse_error: return "parse_error";
        case ErrorKind::unknown_event_type: return "unknown_event_type";
        case ErrorKind::inconsistent_input: return "inconsistent_input";
        case ErrorKind::division_by_zero: return "division_by_zero";
        case ErrorKind::empty_histogram: return "empty_histogram";
        case ErrorKind::duplicate_task: return "duplicate_task";
        case ErrorKind::unparseable_answer: return "unparseable_answer";
        case ErrorKind::ambiguous_date: return "ambiguous_date";
        case ErrorKind::not_a_failure_event: return "not_a_failure_event";
        case ErrorKind::no_primary_probe: return "no_primary_probe";
        case ErrorKind::unknown_fixture: return "unknown_fixture";
        case ErrorKind::invalid_config: return "invalid_config";
        case ErrorKind::io_error: return "io_error";
    }
    return "unknown";
}

class EvalError : public std::runtime_error {
public:
    EvalError(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace evalgate
