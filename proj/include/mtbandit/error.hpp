#pragma once

#include <stdexcept>
#include <string>

namespace mtbandit {

/// Malformed or inconsistent input data (dataset lines, score files, logs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment, policy, feedback or feature configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtbandit
