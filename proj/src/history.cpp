#include "memwave/history.hpp"

#include <cmath>
#include <numeric>

namespace memwave {

double HistoryGrid::weight_sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

HistoryGrid make_history_grid(const Kernel& k, const HistoryOptions& opt) {
  HistoryGrid grid;
  if (k.is_zero()) return grid;
  if (opt.nodes < 1) throw ConfigError("history needs at least one s-node");
  if (!(opt.grading >= 1.0)) throw ConfigError("history grading must be >= 1");
  if (!(opt.stagger >= 0.0 && opt.stagger <= 1.0)) {
    throw ConfigError("history stagger must lie in [0, 1]");
  }
  const double s_max = opt.s_max ? *opt.s_max : truncation_horizon(k, opt.tail_tolerance);
  if (!(s_max > 0.0)) throw ConfigError("history s_max must be positive");

  const int K = opt.nodes;
  const double q = K > 1 ? std::pow(opt.grading, 1.0 / (K - 1)) : 1.0;
  std::vector<double> d(K);
  double total = 0.0;
  for (int i = 0; i < K; ++i) total += d[i] = std::pow(q, i);
  grid.s.assign(K + 1, 0.0);
  for (int i = 0; i < K; ++i) {
    d[i] *= s_max / total;
    grid.s[i + 1] = grid.s[i] + d[i];
  }
  grid.s.back() = s_max;
  grid.spacing = d;
  grid.s_max = s_max;
  grid.tail = tail_mass(k, s_max);

  const double theta = opt.stagger;
  std::vector<double> edges(K + 1);
  edges[0] = 0.0;
  edges[K] = s_max;
  for (int i = 1; i < K; ++i) edges[i] = grid.s[i] + (1.0 - theta) * d[i];
  grid.weights.resize(K);
  grid.flux_weights.resize(K);
  for (int i = 0; i < K; ++i) {
    grid.weights[i] = k.integrate(edges[i], edges[i + 1]);
    grid.flux_weights[i] = grid.weights[i] / d[i];
  }
  grid.derivative_weights.resize(K);
  for (int i = 0; i < K; ++i) {
    const double next = i + 1 < K ? grid.flux_weights[i + 1] : 0.0;
    grid.derivative_weights[i] = next - grid.flux_weights[i];
    if (grid.derivative_weights[i] > 1e-14 * grid.flux_weights[i]) {
      throw KernelError("history weights are not dissipative at s = " +
                        std::to_string(grid.s[i + 1]) +
                        " (w_k/d_k increases); adjust grading or stagger");
    }
  }
  return grid;
}

HistoryField init_history(const PastFunction& past, const Mesh& mesh, const HistoryGrid& grid) {
  const int n = mesh.n_unknowns();
  HistoryField eta(n, grid.size());
  for (int i = 0; i < n; ++i) {
    const double x = mesh.nodes[i + 1];
    const double now = past(x, 0.0);
    for (int k = 0; k < grid.size(); ++k) eta(i, k) = now - past(x, grid.s[k + 1]);
  }
  return eta;
}

double memory_norm_squared(const HistoryField& eta, const HistoryGrid& grid,
                           const DiscreteOperators& ops) {
  if (eta.cols() != grid.size() || (grid.size() > 0 && eta.rows() != ops.n())) {
    throw ShapeError("history field does not match grid/operators");
  }
  double sum = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    sum += grid.weights[k] * eta.col(k).dot(ops.K * eta.col(k));
  }
  return sum;
}

double memory_norm(const HistoryField& eta, const HistoryGrid& grid, const DiscreteOperators& ops) {
  return std::sqrt(std::max(0.0, memory_norm_squared(eta, grid, ops)));
}

double memory_dissipation(const HistoryField& eta, const HistoryGrid& grid,
                          const DiscreteOperators& ops) {
  if (eta.cols() != grid.size()) throw ShapeError("history field does not match grid");
  double sum = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    sum += grid.derivative_weights[k] * eta.col(k).dot(ops.K * eta.col(k));
  }
  return 0.5 * sum;
}

HistoryField transport_apply(const HistoryField& eta, const Vector& v, const HistoryGrid& grid) {
  if (eta.cols() != grid.size() || (grid.size() > 0 && eta.rows() != v.size())) {
    throw ShapeError("transport: history field does not match velocity/grid");
  }
  HistoryField out(eta.rows(), eta.cols());
  for (int k = 0; k < grid.size(); ++k) {
    const double inv = 1.0 / grid.spacing[k];
    if (k == 0) {
      out.col(k) = v - inv * eta.col(k);
    } else {
      out.col(k) = v - inv * (eta.col(k) - eta.col(k - 1));
    }
  }
  return out;
}

Vector weighted_history(const HistoryField& eta, const HistoryGrid& grid) {
  Vector sum = Vector::Zero(eta.rows());
  for (int k = 0; k < grid.size(); ++k) sum += grid.weights[k] * eta.col(k);
  return sum;
}

}  // namespace memwave
