#pragma once

#include <stdexcept>
#include <string>

namespace erasure3d {

/// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A link whose per-attempt success probability is zero; ARQ would never
/// terminate on it.
class StalledLinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every trial at some network size failed, so no exponent can be fitted.
class AllTrialsFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace erasure3d
