#pragma once

#include <stdexcept>
#include <string>

namespace ddd {

/// Inconsistent shapes, out-of-range indices or invalid parameters.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// The data cannot support the requested computation (empty null space,
/// non-finite samples, unstable model where a stable one is required).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddd
