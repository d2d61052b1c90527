#pragma once

#include <stdexcept>

namespace warpconv {

/// Malformed arguments: bad parameters, invalid curves, schema violations.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A coordinate lies outside the base domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A lemma's hypothesis does not hold for the supplied space.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Memory guards and solver non-convergence.
class NumericalGuard : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace warpconv
