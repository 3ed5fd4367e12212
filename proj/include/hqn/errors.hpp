#pragma once

#include <stdexcept>
#include <string>

namespace hqn {

// Invalid argument, config or input-file problem. The CLI maps this to exit code 1.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Operation only defined for a specific dimensionality. The CLI maps this to exit code 2.
class UnsupportedDimensionError : public std::runtime_error {
 public:
  explicit UnsupportedDimensionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hqn
