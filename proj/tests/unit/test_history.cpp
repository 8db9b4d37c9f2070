#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "memwave/dynamics.hpp"
#include "memwave/history.hpp"
#include "memwave/presets.hpp"

using namespace memwave;

namespace {

Matrix random_field(int n, int K, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix eta(n, K);
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < n; ++i) eta(i, j) = nd(rng);
  return eta;
}

}  // namespace

TEST_CASE("history grid structure") {
  const auto k = Kernel::exponential(0.5, 1.0);
  const auto g = make_history_grid(k);
  REQUIRE(g.size() == 64);
  CHECK(g.s.front() == 0.0);
  CHECK(g.s.back() == g.s_max);
  for (int i = 1; i <= g.size(); ++i) CHECK(g.s[i] > g.s[i - 1]);
  CHECK(g.spacing.back() / g.spacing.front() == doctest::Approx(100.0).epsilon(1e-10));
  CHECK(g.tail <= 1e-8 * (1 + 1e-12));
  CHECK(tail_mass(k, g.s_max) == doctest::Approx(g.tail));
  for (double w : g.weights) CHECK(w > 0.0);
  for (std::size_t i = 1; i < g.flux_weights.size(); ++i)
    CHECK(g.flux_weights[i] <= g.flux_weights[i - 1]);
  for (double d : g.derivative_weights) CHECK(d <= 0.0);
  // the cells tile [0, S_max]
  CHECK(k.residual() + g.weight_sum() + g.tail == doctest::Approx(1.0).epsilon(1e-14));

  HistoryOptions fixed;
  fixed.s_max = 5.0;
  fixed.nodes = 10;
  const auto g5 = make_history_grid(k, fixed);
  CHECK(g5.size() == 10);
  CHECK(g5.s_max == 5.0);
  CHECK(g5.tail == doctest::Approx(0.5 * std::exp(-5.0)));
}

TEST_CASE("zero kernel gives an empty history") {
  const auto g = make_history_grid(Kernel::zero());
  CHECK(g.empty());
  const auto ops = assemble(build_mesh(4));
  const HistoryField eta(ops.n(), 0);
  CHECK(memory_norm(eta, g, ops) == 0.0);
  CHECK(weighted_history(eta, g).norm() == 0.0);
  CHECK(transport_apply(eta, Vector::Ones(ops.n()), g).size() == 0);
}

TEST_CASE("history initialization from the past") {
  const auto mesh = build_mesh(8);
  const auto grid = make_history_grid(Kernel::exponential(0.5, 1.0));
  const Vector phi = interpolate(mesh, [](double x) { return std::sin(std::numbers::pi * x / 2); });

  for (const char* preset : {"zero", "constant", "decaying"}) {
    const auto past = make_past_history(preset);
    const auto eta = init_history(past_function(past, mesh, phi), mesh, grid);
    if (std::string(preset) == "decaying") {
      for (int k = 0; k < grid.size(); ++k) {
        const Vector expected = (1.0 - std::exp(-grid.s[k + 1])) * phi;
        CHECK((eta.col(k) - expected).norm() <= 1e-14);
      }
    } else {
      CHECK(eta.norm() == 0.0);
    }
  }
  const auto on = init_history(past_function(make_past_history("switch-on"), mesh, phi), mesh, grid);
  for (int k = 0; k < grid.size(); ++k) CHECK((on.col(k) - phi).norm() == 0.0);

  const PastFunction linear = [&](double x, double t) {
    return t * std::sin(std::numbers::pi * x / 2);
  };
  const auto eta = init_history(linear, mesh, grid);
  for (int k = 0; k < grid.size(); ++k)
    CHECK((eta.col(k) + grid.s[k + 1] * phi).norm() <= 1e-12 * grid.s[k + 1]);
  CHECK_THROWS(make_past_history("sometimes"));
}

TEST_CASE("memory norm") {
  const auto ops = assemble(build_mesh(8));
  const Vector phi = interpolate(ops.mesh, [](double x) { return std::sin(std::numbers::pi * x / 2); });
  const double kphi = phi.dot(ops.K * phi);
  const auto k = Kernel::exponential(0.5, 1.0);

  SUBCASE("zero field") {
    const auto g = make_history_grid(k);
    CHECK(memory_norm(HistoryField::Zero(ops.n(), g.size()), g, ops) == 0.0);
  }
  SUBCASE("constant in s gives g0 (K phi, phi) up to the tail") {
    const auto g = make_history_grid(k);
    const HistoryField eta = phi.replicate(1, g.size());
    CHECK(memory_norm_squared(eta, g, ops) ==
          doctest::Approx(0.5 * kphi).epsilon(2e-8));
  }
  SUBCASE("eta = s phi converges to (2 a / b^3)(K phi, phi) at first order") {
    // integral of a e^{-b s} s^2 ds = 2 a / b^3
    const double exact = 2.0 * 0.5 * kphi;
    double prev = 0.0;
    for (int nodes : {64, 128, 256, 512}) {
      HistoryOptions opt;
      opt.nodes = nodes;
      const auto g = make_history_grid(k, opt);
      HistoryField eta(ops.n(), g.size());
      for (int j = 0; j < g.size(); ++j) eta.col(j) = g.s[j + 1] * phi;
      const double err = std::abs(memory_norm_squared(eta, g, ops) - exact);
      if (prev > 0.0) CHECK(err < 0.6 * prev);
      prev = err;
    }
    CHECK(prev < 1e-2 * exact);
  }
  SUBCASE("norm vanishes only for the zero field") {
    const auto g = make_history_grid(k);
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
      HistoryField eta = HistoryField::Zero(ops.n(), g.size());
      eta.col(t * 5) = random_field(ops.n(), 1, rng);
      CHECK(memory_norm(eta, g, ops) > 0.0);
    }
  }
  SUBCASE("truncation changes the norm by at most the tail") {
    HistoryOptions a, b;
    a.s_max = 8.0;
    b.s_max = 16.0;
    const auto ga = make_history_grid(k, a), gb = make_history_grid(k, b);
    const double na = memory_norm_squared(phi.replicate(1, ga.size()), ga, ops);
    const double nb = memory_norm_squared(phi.replicate(1, gb.size()), gb, ops);
    CHECK(nb >= na);
    CHECK(nb - na <= tail_mass(k, 8.0) * kphi * (1 + 1e-12));
  }
}

TEST_CASE("transport") {
  const auto ops = assemble(build_mesh(6));
  const auto g = make_history_grid(Kernel::exponential(0.5, 1.0));
  const Vector phi = interpolate(ops.mesh, [](double x) { return x * (2 - x); });

  SUBCASE("zero history, velocity phi: every node receives phi") {
    const auto d = transport_apply(HistoryField::Zero(ops.n(), g.size()), phi, g);
    for (int k = 0; k < g.size(); ++k) CHECK((d.col(k) - phi).norm() == 0.0);
  }
  SUBCASE("eta = s phi with v = phi is steady") {
    HistoryField eta(ops.n(), g.size());
    for (int k = 0; k < g.size(); ++k) eta.col(k) = g.s[k + 1] * phi;
    CHECK(transport_apply(eta, phi, g).norm() <= 1e-12);
  }
  SUBCASE("a constant field with v = 0 only changes at the inflow node") {
    const HistoryField eta = phi.replicate(1, g.size());
    const auto d = transport_apply(eta, Vector::Zero(ops.n()), g);
    CHECK((d.col(0) + phi / g.spacing[0]).norm() <= 1e-12 * phi.norm() / g.spacing[0]);
    CHECK(d.rightCols(g.size() - 1).norm() == 0.0);
  }
}

TEST_CASE("dissipation identity of the generator") {
  const auto ops = assemble(build_mesh(8));
  const auto grid = make_history_grid(Kernel::exponential(0.5, 1.0), {.nodes = 16});
  const DafermosModel model(ops, Kernel::exponential(0.5, 1.0), grid);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 100; ++t) {
    Vector x(model.dimension());
    for (auto& v : x) v = nd(rng);
    const double lhs = model.inner(model.generator().apply(x), x);
    const State s = model.unpack(x);
    double jumps = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
      const Vector d = k == 0 ? Vector(s.eta.col(0)) : Vector(s.eta.col(k) - s.eta.col(k - 1));
      jumps += grid.flux_weights[k] * d.dot(ops.K * d);
    }
    const double rhs = memory_dissipation(s.eta, grid, ops) - 0.5 * jumps;
    const double scale = model.inner(x, x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    CHECK(lhs <= 1e-12 * scale);
    CHECK(memory_dissipation(s.eta, grid, ops) <= 0.0);
  }
}
