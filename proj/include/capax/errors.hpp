#pragma once

#include <stdexcept>
#include <string>

namespace capax {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iteration budget ran out before the requested accuracy was reached.
struct NonConvergence : Error {
    using Error::Error;
};

// An integrand produced NaN/Inf at a quadrature node.
struct NonFiniteEvaluation : Error {
    using Error::Error;
};

struct InvalidParameter : Error {
    using Error::Error;
};

// A supplied density does not integrate to 1 within tolerance.
struct NormalizationFailure : Error {
    using Error::Error;
};

// The two independent mutual-information routes disagree beyond tolerance.
struct CrossCheckFailure : Error {
    using Error::Error;
};

// Configuration / input-document problems (CLI exit code 1).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace capax
