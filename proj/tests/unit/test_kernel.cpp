#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "memwave/kernel.hpp"

using namespace memwave;

namespace {

Kernel sampled_from(const std::function<double(double)>& g, double last, int n, RatioBounds rb) {
  std::vector<double> s(n + 1), v(n + 1);
  for (int i = 0; i <= n; ++i) {
    s[i] = last * i / n;
    v[i] = g(s[i]);
  }
  return Kernel::sampled(s, v, rb);
}

}  // namespace

TEST_CASE("exponential kernel mass and residual") {
  const auto k = Kernel::exponential(0.5, 1.0);
  CHECK(k.total_mass() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.residual() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.ratio_bounds().lower == 1.0);
  CHECK(k.ratio_bounds().upper == 1.0);

  const auto k2 = Kernel::exponential(1.0, 4.0);
  CHECK(k2.total_mass() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(k2.residual() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(k2.value(0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(k2.derivative(0.5) == doctest::Approx(-4.0 * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("exponential kernel rejects invalid parameters") {
  try {
    Kernel::exponential(2.0, 1.0);
    FAIL("expected a KernelError");
  } catch (const KernelError& e) {
    CHECK(std::string(e.what()).find("ℓ ≤ 0") != std::string::npos);
  }
  CHECK_THROWS_AS(Kernel::exponential(1.0, 1.0), KernelError);
  CHECK_THROWS_AS(Kernel::exponential(0.0, 1.0), KernelError);
  CHECK_THROWS_AS(Kernel::exponential(-1.0, 1.0), KernelError);
  CHECK_THROWS_AS(Kernel::exponential(0.5, 0.0), KernelError);
  CHECK_NOTHROW(Kernel::exponential(2.0, 1.0, Admissibility::lenient));
}

TEST_CASE("verify_assumptions") {
  const auto grid = uniform_grid(10.0, 0.1);
  REQUIRE(grid.size() == 101);

  SUBCASE("exponential passes with ratio 1") {
    const auto rep = verify_assumptions(Kernel::exponential(0.5, 1.0), grid);
    CHECK(rep.pass);
    CHECK(rep.min_ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.residual == doctest::Approx(0.5));
  }
  SUBCASE("polynomial decay fails with a lower-bound diagnostic") {
    const auto g = [](double s) { return 0.5 / ((1 + s) * (1 + s)); };
    const auto k = sampled_from(g, 50.0, 5000, {0.5, 2.0});
    const auto rep = verify_assumptions(k, k.sample_points());
    CHECK_FALSE(rep.pass);
    REQUIRE_FALSE(rep.diagnostics.empty());
    CHECK(rep.diagnostics.front().find("lower bound") != std::string::npos);
    // -g'/g = 2/(1+s) -> 0
    CHECK(rep.min_ratio < 0.05);
    CHECK(rep.total_mass < 1.0);
  }
  SUBCASE("zero kernel passes") {
    const auto rep = verify_assumptions(Kernel::zero(), grid);
    CHECK(rep.pass);
    CHECK(rep.total_mass == 0.0);
    CHECK(rep.residual == 1.0);
  }
  SUBCASE("lenient g0 >= 1 fails with the residual diagnostic") {
    const auto rep = verify_assumptions(Kernel::exponential(2.0, 1.0, Admissibility::lenient), grid);
    CHECK_FALSE(rep.pass);
    CHECK(rep.diagnostics.front().find("ℓ ≤ 0") != std::string::npos);
  }
  SUBCASE("malformed grids are rejected") {
    const std::vector<double> empty;
    const std::vector<double> offset{0.1, 0.2};
    const std::vector<double> repeated{0.0, 0.5, 0.5};
    const auto k = Kernel::exponential(0.5, 1.0);
    CHECK_THROWS_AS(verify_assumptions(k, empty), std::invalid_argument);
    CHECK_THROWS_AS(verify_assumptions(k, offset), std::invalid_argument);
    CHECK_THROWS_AS(verify_assumptions(k, repeated), std::invalid_argument);
  }
}

TEST_CASE("accepted kernels decay at least at rate zeta0") {
  const auto g = [](double s) { return 0.3 * std::exp(-s) + 0.2 * std::exp(-3.0 * s); };
  const auto k = sampled_from(g, 25.0, 2500, {1.0, 3.0});
  const auto rep = verify_assumptions(k, k.sample_points());
  REQUIRE(rep.pass);
  const auto s = k.sample_points();
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(k.value(s[i]) <= k.value(s[i - 1]));
    CHECK(k.value(s[i]) <= k.value(0.0) * std::exp(-1.0 * s[i]) * (1 + 1e-12));
  }
  CHECK(k.total_mass() < 1.0);
  // g0 against an independent adaptive quadrature of the interpolant
  const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                          [&](double x) { return k.value(x); }, 0.0, 25.0, 12, 1e-14) +
                      k.integrate(25.0, std::numeric_limits<double>::infinity());
  CHECK(k.total_mass() == doctest::Approx(quad).epsilon(1e-10));
  // and against the exact mass of the sampled function
  CHECK(k.total_mass() == doctest::Approx(0.3 + 0.2 / 3.0).epsilon(1e-5));
}

TEST_CASE("laplace transform") {
  const auto k = Kernel::exponential(0.5, 1.0);
  CHECK(std::abs(laplace_transform(k, 0.0) - Complex(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(laplace_transform(k, Complex(0.0, 1.0)) - Complex(0.25, -0.25)) < 1e-15);
  CHECK_THROWS_AS(laplace_transform(k, Complex(-0.1, 0.0)), std::invalid_argument);
  CHECK(laplace_transform(Kernel::zero(), 2.0) == Complex(0.0, 0.0));

  SUBCASE("quadrature route matches the closed form to 1e-10") {
    for (const Complex lambda : {Complex(0, 0), Complex(0.5, 0), Complex(0, 3), Complex(1, -7),
                                 Complex(0.2, 20)}) {
      for (const auto& kk : {Kernel::exponential(0.5, 1.0), Kernel::exponential(1.0, 4.0)}) {
        const Complex exact = laplace_transform(kk, lambda);
        const Complex quad = laplace_transform_quadrature(kk, lambda, 12.0, 400);
        CHECK(std::abs(quad - exact) <= 1e-10 * std::abs(exact));
      }
    }
  }
  SUBCASE("sampled exponential is reproduced exactly") {
    const auto s = sampled_from([](double x) { return 0.5 * std::exp(-x); }, 20.0, 200, {1.0, 1.0});
    for (const Complex lambda : {Complex(2, 0), Complex(0, 1), Complex(0.3, 5)}) {
      CHECK(std::abs(laplace_transform(s, lambda) - 0.5 / (1.0 + lambda)) < 1e-12);
    }
  }
  SUBCASE("sampled kernel at lambda = 2 converges under refinement") {
    const auto g = [](double x) { return 0.3 * std::exp(-x) * (1.0 + 0.5 * std::exp(-2.0 * x)); };
    const auto s = sampled_from(g, 30.0, 600, {1.0, 3.0});
    Complex prev = laplace_transform(s, 2.0, 1);
    bool converged = false;
    for (int panels = 2; panels <= 64; panels *= 2) {
      const Complex next = laplace_transform(s, 2.0, panels);
      if (std::abs(next - prev) <= 1e-10 * std::abs(next)) {
        converged = true;
        break;
      }
      prev = next;
    }
    CHECK(converged);
  }
  SUBCASE("|ĝ| <= g0 on the closed right half-plane") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> re(0.0, 5.0), im(-50.0, 50.0);
    const auto s = sampled_from([](double x) { return 0.4 * std::exp(-2.0 * x); }, 15.0, 300, {2.0, 2.0});
    for (int i = 0; i < 50; ++i) {
      const Complex lambda(re(rng), im(rng));
      CHECK(std::abs(laplace_transform(k, lambda)) <= k.total_mass() * (1 + 1e-14));
      CHECK(std::abs(laplace_transform(s, lambda)) <= s.total_mass() * (1 + 1e-12));
    }
  }
}

TEST_CASE("tail mass") {
  const auto k = Kernel::exponential(0.5, 1.0);
  CHECK(tail_mass(k, 10.0) == doctest::Approx(0.5 * std::exp(-10.0)).epsilon(1e-14));
  CHECK(tail_mass(k, 10.0) == doctest::Approx(2.27e-5).epsilon(1e-2));
  CHECK(tail_mass(k, 0.0) == doctest::Approx(k.total_mass()));
  const auto k2 = Kernel::exponential(1.0, 4.0);
  CHECK(tail_mass(k2, 2.0) == doctest::Approx(0.25 * std::exp(-8.0)).epsilon(1e-14));
  CHECK(tail_mass(k2, 2.0) == doctest::Approx(8.4e-5).epsilon(1e-2));
  CHECK(tail_mass(Kernel::zero(), 3.0) == 0.0);

  double prev = tail_mass(k, 0.0);
  for (double S = 0.25; S < 40.0; S += 0.25) {
    const double t = tail_mass(k, S);
    CHECK(t < prev);
    prev = t;
  }
  CHECK(tail_mass(k, truncation_horizon(k, 1e-8)) == doctest::Approx(1e-8).epsilon(1e-10));
}

TEST_CASE("sampled kernel representation") {
  CHECK_THROWS_AS(Kernel::sampled({0.0}, {1.0}, {1, 1}), KernelError);
  CHECK_THROWS_AS(Kernel::sampled({0.1, 0.2}, {1.0, 0.5}, {1, 1}), KernelError);
  CHECK_THROWS_AS(Kernel::sampled({0.0, 0.0}, {1.0, 0.5}, {1, 1}), KernelError);
  CHECK_THROWS_AS(Kernel::sampled({0.0, 1.0}, {1.0, 0.5}, {0.0, 1.0}), KernelError);
  CHECK_THROWS_AS(Kernel::sampled({0.0, 1.0}, {1.0, 0.5}, {2.0, 1.0}), KernelError);

  // the log-linear interpolant reproduces an exponential and its derivative
  const auto k = sampled_from([](double x) { return 0.5 * std::exp(-x); }, 10.0, 1000, {1.0, 1.0});
  CHECK(k.derivative(3.0) == doctest::Approx(-0.5 * std::exp(-3.0)).epsilon(1e-12));
  CHECK(k.derivative(3.005) == doctest::Approx(-0.5 * std::exp(-3.005)).epsilon(1e-12));
  CHECK(k.derivative(0.0) == doctest::Approx(-0.5).epsilon(1e-12));
  // secant log-slopes stay inside the true ratio range of a two-term kernel
  const auto two = sampled_from([](double x) { return std::exp(-x) + std::exp(-2 * x); }, 10.0, 40, {1.0, 1.5});
  for (double x = 0.0; x < 12.0; x += 0.01) {
    const double r = -two.derivative(x) / two.value(x);
    CHECK(r >= 1.0 - 1e-12);
    CHECK(r <= 1.5 + 1e-12);
  }
  // exponential continuation beyond the last sample
  CHECK(k.value(12.0) == doctest::Approx(0.5 * std::exp(-12.0)).epsilon(1e-12));

  const auto path = std::filesystem::temp_directory_path() / "memwave_kernel_test.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    out << "s,g\n# comment\n";
    for (int i = 0; i <= 100; ++i) out << 0.1 * i << "," << 0.5 * std::exp(-0.1 * i) << "\n";
  }
  const auto f = Kernel::from_csv(path, {1.0, 1.0});
  CHECK(f.sample_points().size() == 101);
  CHECK(f.total_mass() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(verify_assumptions(f, f.sample_points()).pass);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Kernel::from_csv("/nonexistent/kernel.csv", {1, 1}), KernelError);
}
