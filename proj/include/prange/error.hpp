#pragma once

#include <stdexcept>
#include <string>

namespace prange {

// Every failure surfaced by the library carries one of these codes. The CLI
// and the HTTP service map them onto exit codes and status codes.
enum class ErrorCode {
    // expression evaluation
    DomainError,
    DivisionByZero,
    // model loading / validation
    ParseError,
    UnknownEntity,
    DuplicateId,
    ArityMismatch,
    UnknownParameter,
    UnsupportedConstraint,
    // computation
    SeparationError,
    ConfigError,
    RecursionLimit,
    SolveFailure,
    // session state machine
    OutOfRange,
    StaleRanges,
    EmptyHistory,
    Precondition,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised by eval(); DivisionByZero is a kind of domain failure so callers
// can catch both with one handler.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& detail, ErrorCode code = ErrorCode::DomainError)
        : Error(code, detail) {}
};

class DivisionByZero : public DomainError {
public:
    explicit DivisionByZero(const std::string& detail)
        : DomainError(detail, ErrorCode::DivisionByZero) {}
};

} // namespace prange
