#pragma once

#include <stdexcept>
#include <string>

namespace epsqca {

/// Malformed arguments: bad intervals, non-Hermitian terms, unknown presets.
class InputError : public std::invalid_argument {
  public:
    explicit InputError(const std::string &msg) : std::invalid_argument(msg) {}
};

/// Work that would exceed the dense-matrix or bond-dimension caps.
class ResourceError : public std::runtime_error {
  public:
    explicit ResourceError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Numerical failure: non-convergence, decomposition breakdown, gate checks.
class ComputationError : public std::runtime_error {
  public:
    explicit ComputationError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace epsqca
