#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "memwave/discretization.hpp"
#include "memwave/kernel.hpp"

namespace memwave {

struct HistoryOptions {
  std::optional<double> s_max;  // unset: smallest horizon with tail_mass <= tail_tolerance
  int nodes = 64;
  double grading = 100.0;  // ratio of the last to the first s-spacing
  double stagger = 0.7;    // fraction of the left spacing owned by each node's cell
  double tail_tolerance = 1e-8;
};

/**
 * Truncated s-grid 0 = s_0 < s_1 < ... < s_K = S_max with kernel weights.
 *
 * The history values live on s_1 .. s_K; s_0 carries the inflow value
 * eta = 0 and is not a coordinate. Weight w_k is the exact kernel integral
 * over the cell [s_k - theta d_k, s_k + (1 - theta) d_{k+1}] (first edge 0,
 * last edge S_max), d_k = s_k - s_{k-1}.
 */
struct HistoryGrid {
  std::vector<double> s;        // K + 1 nodes including s_0 = 0
  std::vector<double> spacing;  // d_1 .. d_K
  std::vector<double> weights;  // w_1 .. w_K
  std::vector<double> flux_weights;  // c_k = w_k / d_k
  /// Discrete g'-weights c_{k+1} - c_k (c_{K+1} = 0); all nonpositive.
  std::vector<double> derivative_weights;
  double s_max = 0.0;
  double tail = 0.0;  // tail_mass(kernel, s_max)

  int size() const noexcept { return static_cast<int>(weights.size()); }
  bool empty() const noexcept { return weights.empty(); }
  double weight_sum() const;
};

/// Zero kernels give an empty grid. Throws KernelError if the resulting
/// c_k fail to be nonincreasing (the upwind dissipativity condition).
HistoryGrid make_history_grid(const Kernel& k, const HistoryOptions& opt = {});

/// History values, column k - 1 holding eta_k over the spatial unknowns.
using HistoryField = Matrix;

/// Past data u0(x, t) = u(x, -t), t >= 0.
using PastFunction = std::function<double(double x, double t)>;

/// eta_k = u0(., 0) - u0(., s_k) at the unknowns.
HistoryField init_history(const PastFunction& past, const Mesh& mesh, const HistoryGrid& grid);

/// Sum_k w_k (K eta_k, eta_k).
double memory_norm_squared(const HistoryField& eta, const HistoryGrid& grid,
                           const DiscreteOperators& ops);
double memory_norm(const HistoryField& eta, const HistoryGrid& grid, const DiscreteOperators& ops);

/// 1/2 Sum_k w'_k (K eta_k, eta_k) <= 0.
double memory_dissipation(const HistoryField& eta, const HistoryGrid& grid,
                          const DiscreteOperators& ops);

/// d eta / dt = -D_s eta + v with first-order upwind D_s and eta_0 = 0.
HistoryField transport_apply(const HistoryField& eta, const Vector& v, const HistoryGrid& grid);

/// Sum_k w_k eta_k (the memory displacement entering the momentum equation).
Vector weighted_history(const HistoryField& eta, const HistoryGrid& grid);

}  // namespace memwave
