#pragma once

#include <stdexcept>
#include <string>

namespace dualrisk {

// Argument or regime violation (bad probability, loading below threshold, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Denominator of the saturated-coverage formula is not positive.
class SignError : public DomainError {
public:
    explicit SignError(const std::string& what) : DomainError(what) {}
};

// No reduction level has cost below the agent's willingness to pay.
class EmptyAdmissibleError : public std::runtime_error {
public:
    explicit EmptyAdmissibleError(const std::string& what) : std::runtime_error(what) {}
};

// Feasible region for the policy optimizer has collapsed to measure zero.
class DegenerateError : public std::runtime_error {
public:
    explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

// Root bracketing failed: no sign change over the search interval.
class NoBracketError : public std::runtime_error {
public:
    explicit NoBracketError(const std::string& what) : std::runtime_error(what) {}
};

// Iteration cap reached before convergence.
class MaxIterError : public std::runtime_error {
public:
    explicit MaxIterError(const std::string& what) : std::runtime_error(what) {}
};

// Scenario file is malformed (syntax, unknown field, wrong type).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dualrisk
