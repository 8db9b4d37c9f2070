#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace memwave {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using CSparseMatrix = Eigen::SparseMatrix<Complex>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel rejected at construction (bad parameters, violated admissibility).
class KernelError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operands with incompatible layouts.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A shifted system (lambda I - A) that is numerically singular.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double distance_estimate)
      : Error(what), distance_estimate_(distance_estimate) {}

  /// Estimated distance from the shift to the spectrum.
  double distance_estimate() const noexcept { return distance_estimate_; }

 private:
  double distance_estimate_;
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace memwave
