#pragma once

#include <stdexcept>
#include <string>

namespace cfode {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- quadrature / operators ---------------------------------------------

struct GridTooSmall : Error {
    using Error::Error;
};

struct OrderOutOfRange : Error {
    using Error::Error;
};

// -- linear solver -------------------------------------------------------

struct NonzeroForcingAtStart : Error {
    NonzeroForcingAtStart(const std::string& msg, double magnitude)
        : Error(msg), magnitude(magnitude) {}
    double magnitude;  // |f(a)|, the residual term the solution would carry
};

struct SingularConstantFit : Error {
    using Error::Error;
};

struct DegenerateLeadingCoefficient : Error {
    using Error::Error;
};

// -- nonlinear solver ----------------------------------------------------

struct NotContractive : Error {
    NotContractive(const std::string& msg, double q) : Error(msg), q(q) {}
    double q;
};

struct MaxIterationsExceeded : Error {
    MaxIterationsExceeded(const std::string& msg, double last_diff)
        : Error(msg), last_diff(last_diff) {}
    double last_diff;
};

// -- mass-spring-damper --------------------------------------------------

struct SolvabilityViolation : Error {
    using Error::Error;
};

struct NearSingularStep : Error {
    using Error::Error;
};

// -- expression parser ---------------------------------------------------

struct SyntaxError : Error {
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg), offset(offset) {}
    std::size_t offset;  // byte offset into the source string
};

struct UnknownIdentifier : Error {
    UnknownIdentifier(const std::string& msg, std::size_t offset)
        : Error(msg), offset(offset) {}
    std::size_t offset;
};

struct EvalDomainError : Error {
    using Error::Error;
};

struct MissingVariable : Error {
    using Error::Error;
};

struct UnsupportedDifferentiation : Error {
    using Error::Error;
};

}  // namespace cfode
