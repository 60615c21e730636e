#pragma once

#include <stdexcept>
#include <string>

namespace hyperbo {

/// Raised when a caller breaks an operation's precondition (dimension
/// mismatch, out-of-range parameter, too-small iteration count, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Gram matrix could not be factorized even after the full jitter ladder.
class SingularGramError : public std::runtime_error {
public:
    SingularGramError(const std::string& what, double jitter)
        : std::runtime_error(what), jitter_(jitter) {}

    /// Largest diagonal jitter that was attempted (absolute units).
    double jitter() const noexcept { return jitter_; }

private:
    double jitter_;
};

/// No admissible candidate remains for an acquisition step.
class ExhaustedSearchSpace : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent tabular input.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hyperbo
