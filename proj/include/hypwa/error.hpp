#pragma once

#include <stdexcept>
#include <string>

namespace hypwa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: unknown vertex ids, unparsable files, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A structural precondition of the graph does not hold (disconnected,
/// non-geodesic ray, core too small, ...).
class GraphError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace hypwa
