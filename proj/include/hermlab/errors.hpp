#pragma once

#include <stdexcept>
#include <string>

namespace hermlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// metric not positive definite (or numerically singular)
struct SingularMetricError : Error {
  using Error::Error;
};

// a sample or stencil point fell outside the chart box
struct DomainError : Error {
  using Error::Error;
};

// incompatible tensor indices in a contraction
struct IndexError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct UnsupportedError : Error {
  using Error::Error;
};

}  // namespace hermlab
