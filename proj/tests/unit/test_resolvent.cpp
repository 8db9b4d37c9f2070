#include <doctest.h>

#include <cmath>
#include <random>

#include "memwave/resolvent.hpp"

using namespace memwave;

namespace {

DafermosModel model_for(const Kernel& k, int n, int nodes) {
  HistoryOptions opt;
  opt.nodes = nodes;
  return DafermosModel(assemble(build_mesh(n)), k, make_history_grid(k, opt));
}

CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector x(n);
  for (auto& v : x) v = Complex(nd(rng), nd(rng));
  return x;
}

double hnorm(const DafermosModel& m, const CVector& x) { return std::sqrt(m.inner(x, x).real()); }

CVector apply_shifted(const DafermosModel& m, Complex lambda, const CVector& V) {
  const Vector re = m.generator().apply(V.real()), im = m.generator().apply(V.imag());
  CVector AV(V.size());
  AV.real() = re;
  AV.imag() = im;
  return lambda * V - AV;
}

}  // namespace

TEST_CASE("resolvent solves") {
  const auto k = Kernel::exponential(0.5, 1.0);
  const auto model = model_for(k, 8, 16);
  const Resolvent R(model);
  const int dim = model.dimension();
  std::mt19937_64 rng(5);

  CHECK(R.dense(Complex(0, 3), CVector::Zero(dim)).norm() == 0.0);
  CHECK(R.reduced(Complex(0, 3), CVector::Zero(dim)).norm() == 0.0);

  for (const Complex lambda : {Complex(1, 0), Complex(0, 0), Complex(0.5, 2)}) {
    const CVector F = random_state(dim, rng);
    const CVector V = R.dense(lambda, F);
    CHECK((apply_shifted(model, lambda, V) - F).norm() <= 1e-10 * F.norm());
    const CVector W = R.reduced(lambda, F);
    CHECK(hnorm(model, V - W) <= 1e-8 * hnorm(model, F));
  }
}

TEST_CASE("reduced and dense solves agree on random shifts") {
  const auto model = model_for(Kernel::exponential(0.5, 1.0), 8, 16);
  const Resolvent R(model);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> im(-20.0, 20.0);
  for (int t = 0; t < 50; ++t) {
    const Complex lambda(0.5 * pick(rng), im(rng));
    const CVector F = random_state(model.dimension(), rng);
    const CVector d = R.dense(lambda, F), r = R.reduced(lambda, F);
    CHECK(hnorm(model, d - r) <= 1e-8 * hnorm(model, F));
  }
}

TEST_CASE("reduced stiffness coefficient approaches 1 - ĝ(lambda)") {
  const auto k = Kernel::exponential(0.5, 1.0);
  double prev = 1e300;
  for (int nodes : {32, 64, 128, 256}) {
    const auto model = model_for(k, 4, nodes);
    const double err = std::abs(Resolvent(model).reduced_coefficient(1.0) - 0.75);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
  const auto elastic = model_for(Kernel::zero(), 4, 1);
  CHECK(Resolvent(elastic).reduced_coefficient(Complex(0, 5)) == Complex(1.0, 0.0));
}

TEST_CASE("shift on the spectrum is reported as singular") {
  const auto model = model_for(Kernel::zero(), 8, 1);
  const auto rep = eigen_certificate(model.generator().dense());
  Complex lambda = rep.eigenvalues(0);
  lambda = Complex(0.0, lambda.imag());
  const Resolvent R(model);
  std::mt19937_64 rng(7);
  try {
    R.dense(lambda, random_state(model.dimension(), rng));
    FAIL("expected SingularSystemError");
  } catch (const SingularSystemError& e) {
    CHECK(e.distance_estimate() <= 1e-10);
  }
}

TEST_CASE("resolvent norm") {
  const auto model = model_for(Kernel::exponential(0.5, 1.0), 8, 16);
  const ResolventNorm svd(model, 100000);
  const ResolventNorm lanczos(model, 0);
  CHECK(svd.uses_svd());
  CHECK_FALSE(lanczos.uses_svd());
  const auto eig = eigen_certificate(model.generator().dense());

  for (double beta : {0.0, 0.7, 3.0, 15.0, 60.0}) {
    const double a = svd(beta), b = lanczos(beta);
    CHECK(b == doctest::Approx(a).epsilon(1e-8));
    CHECK(svd(-beta) == doctest::Approx(a).epsilon(1e-10));
    double dist = 1e300;
    for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j)
      dist = std::min(dist, std::abs(Complex(0, beta) - eig.eigenvalues(j)));
    CHECK(a >= (1.0 - 1e-10) / dist);
  }
}

TEST_CASE("sweep") {
  const auto model = model_for(Kernel::exponential(0.5, 1.0), 8, 16);
  SweepOptions opt;
  opt.points = 12;
  opt.beta_max = 40.0;
  opt.dense_limit = 0;
  const auto res = resolvent_sweep(model, opt);
  REQUIRE(res.beta.size() == res.norm.size());
  CHECK(res.finite);
  CHECK(res.method == "lanczos");
  CHECK(std::is_sorted(res.beta.begin(), res.beta.end()));
  CHECK(std::find(res.beta.begin(), res.beta.end(), 0.0) != res.beta.end());
  for (std::size_t i = 0; i < res.beta.size(); ++i) {
    for (std::size_t j = 0; j < res.beta.size(); ++j) {
      if (res.beta[j] == -res.beta[i]) CHECK(std::abs(res.norm[i] - res.norm[j]) <= 1e-10 * res.norm[i]);
    }
    CHECK(res.norm[i] <= res.sup);
  }
  CHECK(std::abs(res.argmax) <= 40.0);

  SUBCASE("threads give identical results") {
    SweepOptions t = opt;
    t.threads = 3;
    const auto par = resolvent_sweep(model, t);
    CHECK(par.beta == res.beta);
    CHECK(par.norm == res.norm);
  }
  SUBCASE("invalid grids") {
    SweepOptions bad = opt;
    bad.points = 0;
    CHECK_THROWS_AS(resolvent_sweep(model, bad), ConfigError);
    bad = opt;
    bad.beta_max = 0.0;
    CHECK_THROWS_AS(resolvent_sweep(model, bad), ConfigError);
    CHECK_THROWS_AS(resolvent_sweep(model, std::vector<double>{}), ConfigError);
  }
  SUBCASE("elastic sweep is unbounded near eigenfrequencies") {
    const auto elastic = model_for(Kernel::zero(), 8, 1);
    const auto eig = eigen_certificate(elastic.generator().dense());
    const double beta = std::abs(eig.eigenvalues(0).imag());
    const auto r = resolvent_sweep(elastic, std::vector<double>{beta}, opt);
    CHECK((!r.finite || r.sup > 1e8));
  }
}
