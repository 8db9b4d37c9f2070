#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "memwave/discretization.hpp"
#include "memwave/history.hpp"

namespace memwave {

struct InitialData {
  Vector u;
  Vector v;
};

/**
 * Initial displacement/velocity presets:
 *   sine      u = sin(pi x / 2), v = 0
 *   gaussian  u = exp(-((x - 0.5) / 0.1)^2), v = 0
 *   zero      u = v = 0
 *   random    nodal values uniform in [-1, 1] for u and v, drawn from `seed`
 *   file:PATH one (u) or two (u, v) whitespace/comma separated columns with
 *             n_cells or n_cells + 1 rows (the x = 0 row, if present, must be 0)
 */
InitialData make_initial_data(std::string_view preset, const Mesh& mesh, std::uint64_t seed = 0);

/**
 * Separable past u(x, -s) = c exp(-r s) u_init(x) for s > 0, while
 * u(x, 0) = u_init(x).
 *   zero, constant  c = 1, r = 0  (body at rest in its initial shape; eta = 0)
 *   switch-on       c = 0         (motion starts at t = 0; eta jumps at s = 0)
 *   decaying        c = 1, r = 1
 */
struct PastHistory {
  std::string name = "zero";
  double amplitude = 1.0;
  double rate = 0.0;

  double factor(double s) const;
};

PastHistory make_past_history(std::string_view preset);

/// Past as a function u0(x, t) = u(x, -t) for init_history.
PastFunction past_function(const PastHistory& past, const Mesh& mesh, const Vector& u_init);

/// Integral over s in [t, inf) of g(s) exp(-r (s - t)) (or g'(s) exp(...)
/// when `derivative` is set). Closed form for zero/exponential kernels and
/// for r = 0; Gauss-Legendre otherwise.
double past_weight(const Kernel& k, double t, double r, bool derivative = false);

}  // namespace memwave
