#pragma once

#include <stdexcept>
#include <string>

namespace ffp {

/// Malformed or out-of-range input data (images, seeds, files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical precondition failed (degenerate tensor, positivity violated).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid solver or pipeline configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ffp
