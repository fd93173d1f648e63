#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nnls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, model, stepper or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the grid, or an index is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for the given nonlinearity (e.g. the radial factor
/// of an x-dependent model).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration hit its iteration cap.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_residual, int iterations)
      : Error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

/// Non-finite values appeared in an iterate.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nnls
