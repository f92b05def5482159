#pragma once

#include <stdexcept>
#include <string>

namespace nkt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. an index >= dim).
struct DomainError : Error {
    using Error::Error;
};

/// A jet order would exceed the configured maximum.
struct OverflowError : Error {
    using Error::Error;
};

/// Grassmann parity mismatch: heterogeneous derivations, odd Lagrangians, even BRST candidates.
struct ParityError : Error {
    using Error::Error;
};

/// Operators whose parameter/target spaces do not line up.
struct SpaceMismatchError : Error {
    using Error::Error;
};

/// Malformed or missing reduction certificate.
struct CertificateError : Error {
    using Error::Error;
};

/// A required symbol (variable, operator, derivation) is not declared.
struct UndeclaredError : Error {
    using Error::Error;
};

}  // namespace nkt
