#pragma once

#include <string>
#include <vector>

#include "memwave/dynamics.hpp"

namespace memwave {

enum class Verdict { stable, unstable, inconclusive };

std::string to_string(Verdict v);

/// Margin below which an abscissa is treated as touching the imaginary axis.
inline constexpr double kAxisTolerance = 1e-8;

Verdict classify_abscissa(double abscissa);

struct EigenReport {
  CVector eigenvalues;
  double abscissa = 0.0;
  /// min |Re lambda| over the computed eigenvalues.
  double axis_margin = 0.0;
  double max_imag = 0.0;
  bool converged = true;
  bool partial = false;  // true when only rightmost eigenvalues were computed
  std::string method;
  Verdict verdict = Verdict::inconclusive;
};

/// Full spectrum of a dense real matrix (LAPACK dgeev).
EigenReport eigen_certificate(const Matrix& A);

struct ArnoldiOptions {
  int krylov_dim = 40;
  /// Shifts on the imaginary axis, i beta. Empty: {0} plus a geometric
  /// ladder up to `beta_max`.
  std::vector<double> betas;
  double beta_max = 0.0;
  double tolerance = 1e-9;
  unsigned long seed = 7;
};

/**
 * Rightmost eigenvalues of the pencil (J, E) by shift-invert Arnoldi with
 * shifts on iR: for each shift sigma, Ritz values theta of (J - sigma E)^{-1} E
 * give lambda = sigma + 1/theta. Only Ritz pairs with relative residual below
 * the tolerance are kept.
 */
EigenReport arnoldi_certificate(const GeneratorMatrix& gen, const ArnoldiOptions& opt = {});

/// Dense solve when dim <= dense_limit, Arnoldi otherwise.
EigenReport spectrum(const GeneratorMatrix& gen, int dense_limit = 4000,
                     const ArnoldiOptions& opt = {});

}  // namespace memwave
