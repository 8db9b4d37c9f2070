#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/SparseLU>

#include "memwave/discretization.hpp"
#include "memwave/history.hpp"
#include "memwave/kernel.hpp"
#include "memwave/presets.hpp"

namespace memwave {

/// Phase-space state. The boundary velocity w is v(N - 1): the boundary
/// unknown of v carries the point mass, so w = trace(v) by construction.
struct State {
  Vector u;
  Vector v;
  HistoryField eta;  // n x K

  double boundary_velocity() const { return v(v.size() - 1); }
};

/// Descriptor form E x' = J x of the semi-discrete system. The generator is
/// A_h = E^{-1} J, with E = blockdiag(I, M_total, I, ..., I).
struct GeneratorMatrix {
  SparseMatrix E;
  SparseMatrix J;
  int n_u = 0;
  int history_nodes = 0;

  int dimension() const noexcept { return static_cast<int>(J.rows()); }
  /// A_h x.
  Vector apply(const Vector& x) const;
  /// Dense A_h.
  Matrix dense() const;

  /// Factorization of M_total shared by copies.
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> mass_solver;
};

/// History (Dafermos) formulation: (u, v, eta_1 .. eta_K).
class DafermosModel {
 public:
  DafermosModel(DiscreteOperators ops, Kernel kernel, HistoryGrid grid);

  const DiscreteOperators& ops() const noexcept { return ops_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const HistoryGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return ops_.n(); }
  int history_nodes() const noexcept { return grid_.size(); }
  /// 2 n + K n.
  int dimension() const noexcept { return (2 + history_nodes()) * n(); }
  /// Stiffness coefficient ell = 1 - g0 of the instantaneous term.
  double ell() const noexcept { return ell_; }

  State derivative(const State& x) const;

  Vector pack(const State& x) const;
  State unpack(const Vector& x) const;
  State zero_state() const;

  const GeneratorMatrix& generator() const noexcept { return gen_; }
  /// Gram matrix of the H inner product: blockdiag(ell K, M_total, w_k K).
  const SparseMatrix& gram() const noexcept { return gram_; }
  double inner(const Vector& x, const Vector& y) const { return x.dot(gram_ * y); }
  Complex inner(const CVector& x, const CVector& y) const;

  /// State built from initial data and a past preset.
  State initial_state(const InitialData& init, const PastHistory& past) const;

 private:
  void check(const State& x) const;

  DiscreteOperators ops_;
  Kernel kernel_;
  HistoryGrid grid_;
  double ell_;
  GeneratorMatrix gen_;
  SparseMatrix gram_;
};

GeneratorMatrix build_generator(const DafermosModel& model);

/**
 * Implicit midpoint for E x' = J x:
 * (E - dt/2 J) x_{n+1} = (E + dt/2 J) x_n. The factorization is cached and
 * reused while dt stays the same.
 */
class MidpointStepper {
 public:
  explicit MidpointStepper(const GeneratorMatrix& gen);
  Vector step(const Vector& x, double dt);

 private:
  void factorize(double dt);

  SparseMatrix E_;
  SparseMatrix J_;
  double dt_ = 0.0;
  SparseMatrix rhs_;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/**
 * Prony reduction for g(s) = a exp(-b s): z = integral of g(s) u(t - s) ds obeys
 * z' = a u - b z, and M_total v' = -K u + K z. State (u, v, z).
 */
class PronyModel {
 public:
  PronyModel(DiscreteOperators ops, Kernel kernel);

  const DiscreteOperators& ops() const noexcept { return ops_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  int n() const noexcept { return ops_.n(); }
  const GeneratorMatrix& generator() const noexcept { return gen_; }

  /// z(0) = integral of g(s) u(-s) ds, in closed form for the past presets.
  Vector initial_memory(const InitialData& init, const PastHistory& past) const;
  Vector initial_state(const InitialData& init, const PastHistory& past) const;

  /// Energy 1/2 (ell (K u, u) + (M_total v, v) + (K zeta, zeta) / g0) with
  /// zeta = g0 u - z; its exact rate is -(b / g0) (K zeta, zeta).
  double hilbert_energy(const Vector& x) const;
  double paper_energy(const Vector& x) const;
  double dissipation(const Vector& x) const;

 private:
  DiscreteOperators ops_;
  Kernel kernel_;
  GeneratorMatrix gen_;
};

/**
 * Direct convolution formulation
 *   M_total v' = -K u + K m(t),  m(t) = integral over s of g(s) u(t - s).
 * u is taken piecewise linear between stored snapshots (product integration,
 * Gauss-Legendre on each dt interval); the part of the integral reaching
 * before t = 0 uses the separable past preset. Snapshots are kept in a ring
 * buffer covering [0, S_max]; contributions beyond S_max (at most
 * tail_mass(S_max) |u|) are dropped.
 */
class ConvolutionSolver {
 public:
  /// `capacity` is the number of stored snapshots; by default enough for
  /// S_max / dt lags. A smaller capacity raises "insufficient history buffer".
  ConvolutionSolver(DiscreteOperators ops, Kernel kernel, double s_max, double dt,
                    const InitialData& init, PastHistory past,
                    std::optional<std::size_t> capacity = std::nullopt);

  void step();
  double time() const noexcept { return step_ * dt_; }
  long steps_taken() const noexcept { return step_; }
  const Vector& u() const noexcept { return u_; }
  const Vector& v() const noexcept { return v_; }
  double dt() const noexcept { return dt_; }
  int lags() const noexcept { return lags_; }

  /// m(t_n) at the current step.
  Vector memory_term() const;
  /// (du/dt, dv/dt) at the current state.
  std::pair<Vector, Vector> derivative() const;

  /// Memory-norm and g'-weighted history terms evaluated from the buffer,
  /// giving energies comparable with the history formulation.
  double hilbert_energy() const;
  double paper_energy() const;
  double dissipation() const;

 private:
  Vector known_memory(long n) const;
  const Vector& snapshot(long n) const;
  double history_quadratic(bool derivative) const;

  DiscreteOperators ops_;
  Kernel kernel_;
  PastHistory past_;
  Vector phi_;  // initial displacement, profile of the past
  double dt_;
  int lags_;
  long step_ = 0;
  Vector u_, v_;
  Vector m_current_;
  std::vector<double> left_, right_;    // hat weights against g
  std::vector<double> dleft_, dright_;  // hat weights against g'
  std::deque<Vector> buffer_;           // newest first
  std::size_t capacity_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
  Eigen::SimplicialLDLT<SparseMatrix> mass_solver_;
  double omega0_;
};

}  // namespace memwave
