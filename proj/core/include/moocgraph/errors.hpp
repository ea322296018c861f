#pragma once

#include <stdexcept>
#include <string>

namespace moocgraph {

// Stream or file could not be read/written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration or mismatched pipeline inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training data the SVM cannot be fitted on (e.g. a single class).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace moocgraph
