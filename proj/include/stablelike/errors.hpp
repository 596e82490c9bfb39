#pragma once

#include <stdexcept>
#include <string>

namespace stablelike {

// Experiment configuration is unusable (bad field, missing key, bad schema).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A kernel produced an intensity outside its declared two-sided bounds while
// sampling (the declared kappa is wrong for the supplied kernel).
class KernelBoundViolation : public std::runtime_error {
 public:
  explicit KernelBoundViolation(const std::string& what) : std::runtime_error(what) {}
};

// Mollified-kernel evaluation fell back to the regularizer too often: the
// probe grid extends past the region the occupation ensemble covers.
class SupportCoverageError : public std::runtime_error {
 public:
  explicit SupportCoverageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stablelike
