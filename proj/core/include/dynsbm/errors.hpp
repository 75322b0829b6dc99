#pragma once

#include <stdexcept>
#include <string>

namespace dynsbm {

/// Invalid configuration (bad hyperparameters, inconsistent options).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical operation failed beyond recovery (factorization after
/// jitter, degenerate particle weights, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dynsbm
