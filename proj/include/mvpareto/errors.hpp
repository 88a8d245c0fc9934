#pragma once

#include <stdexcept>
#include <string>

namespace mvpareto {

/// Invalid model parameters or arguments (exit code 3 at the CLI).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A requested moment does not exist for the given tail index.
/// Distinct from numeric failure: this is a property of the model.
class InfiniteMomentError : public ModelError {
public:
    using ModelError::ModelError;
};

/// A series or iteration failed to reach its tolerance within its cap (exit code 4).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration input (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mvpareto
