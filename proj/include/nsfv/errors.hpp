#pragma once

#include <stdexcept>
#include <string>

namespace nsfv {

/// Invalid configuration or inconsistent construction arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a constitutive law or diagnostic.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query outside the stored span (time, window, snapshot index).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// File-system or format failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsfv
