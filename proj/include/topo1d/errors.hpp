#pragma once

#include <stdexcept>
#include <string>

namespace topo1d {

/// A computation could not produce a trustworthy result (non-convergence, singular system).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (unknown keys, missing sections, bad values).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topo1d
