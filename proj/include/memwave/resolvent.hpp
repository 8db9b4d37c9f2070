#pragma once

#include <optional>
#include <vector>

#include "memwave/dynamics.hpp"
#include "memwave/spectral.hpp"

namespace memwave {

/// Ratio |V| / |F| above which a shifted solve is declared near-singular.
inline constexpr double kSingularGrowth = 1e12;

/**
 * Resolvent V = (lambda I - A_h)^{-1} F of the history formulation. F and V
 * are stacked states (u, v, eta_1 .. eta_K).
 */
class Resolvent {
 public:
  explicit Resolvent(const DafermosModel& model);

  /// Sparse LU of the descriptor pencil lambda E - J on the stacked system.
  /// Throws SingularSystemError (with distance estimate |F| / |V|) when the
  /// shift is numerically on the spectrum.
  CVector dense(Complex lambda, const CVector& F) const;

  /**
   * Elimination to the displacement: v = lambda u - f1, and the upwind
   * recursion gives eta_k = alpha_k v + beta_k. With
   * G_h = sum w_k alpha_k and b = sum w_k beta_k, u solves
   *   [lambda^2 M_total + (ell + lambda G_h) K] u
   *       = M_total (lambda f1 + f2) + G_h K f1 - K b,
   * an n-dimensional complex Helmholtz problem whose stiffness coefficient
   * ell + lambda G_h approximates 1 - ĝ(lambda). Throws SingularSystemError
   * if the reduced matrix cannot be factored.
   */
  CVector reduced(Complex lambda, const CVector& F) const;

  /// ell + lambda G_h, the reduced stiffness coefficient.
  Complex reduced_coefficient(Complex lambda) const;

  const DafermosModel& model() const noexcept { return model_; }

 private:
  const DafermosModel& model_;
};

struct SweepOptions {
  /// Grid points on (0, beta_max]; the grid is mirrored to negative beta and
  /// includes 0. Must be positive.
  int points = 64;
  double beta_max = 0.0;
  double beta_min = 1e-2;  // smallest positive grid value
  int refine_passes = 3;   // bisection passes around local maxima
  int dense_limit = 2000;  // SVD below this dimension, Lanczos above
  int lanczos_dim = 80;
  double lanczos_tolerance = 1e-13;
  unsigned threads = 1;
};

struct SweepResult {
  std::vector<double> beta;
  std::vector<double> norm;  // r(beta) in the H norm
  double sup = 0.0;
  double argmax = 0.0;
  bool finite = true;
  std::string method;
};

/// H-norm of (i beta - A_h)^{-1}.
class ResolventNorm {
 public:
  explicit ResolventNorm(const DafermosModel& model, int dense_limit = 2000, int lanczos_dim = 80,
                         double lanczos_tolerance = 1e-13);
  double operator()(double beta) const;
  bool uses_svd() const noexcept { return dense_; }

 private:
  double svd_norm(double beta) const;
  double lanczos_norm(double beta) const;

  const DafermosModel& model_;
  bool dense_;
  int lanczos_dim_;
  double tol_;
  Matrix L_;       // Cholesky factor of the Gram matrix (dense path)
  Matrix A_;       // dense generator (dense path)
  CVector start_;  // deterministic real start vector (iterative path)
  Eigen::SimplicialLLT<SparseMatrix> gram_chol_;
};

/// Symmetric log-spaced grid up to beta_max, with refinement near maxima.
SweepResult resolvent_sweep(const DafermosModel& model, const SweepOptions& opt);

/// r(beta) on a caller-supplied grid (no refinement).
SweepResult resolvent_sweep(const DafermosModel& model, const std::vector<double>& betas,
                            const SweepOptions& opt = {});

}  // namespace memwave
