#pragma once

#include <stdexcept>
#include <string>

namespace glocalkd {

/// Malformed input: bad graph construction, unreadable or inconsistent
/// benchmark files, invalid synthetic-corpus specs. CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible configuration: shape mismatches, feature-dimension
/// mismatches between model and data, invalid experiment axes. CLI exit
/// code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss or gradient encountered during optimization. CLI exit
/// code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glocalkd
