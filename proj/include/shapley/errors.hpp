#pragma once

#include <stdexcept>
#include <string>

namespace shapley {

// Failure categories map one-to-one onto the CLI exit codes.

/// Invalid or inconsistent experiment / estimator configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV cells, dimensions, model/data mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid model (bad child indices, cover inconsistency, zero cover).
class ModelError : public DataError {
 public:
  using DataError::DataError;
};

/// Factorisation or conditioning failure that survives jitter escalation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds what the evaluation budget or player count allows.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shapley
