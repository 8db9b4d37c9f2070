#include "memwave/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/SVD>

namespace memwave {

namespace {

using ComplexLU = Eigen::SparseLU<CSparseMatrix, Eigen::COLAMDOrdering<int>>;

std::string shift_text(Complex z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

void factor_or_throw(ComplexLU& lu, const CSparseMatrix& A, Complex lambda) {
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw SingularSystemError("shifted system is singular at lambda = " + shift_text(lambda), 0.0);
  }
}

}  // namespace

Resolvent::Resolvent(const DafermosModel& model) : model_(model) {}

CVector Resolvent::dense(Complex lambda, const CVector& F) const {
  const auto& gen = model_.generator();
  if (F.size() != gen.dimension()) throw ShapeError("resolvent: right-hand side has wrong dimension");
  if (F.norm() == 0.0) return CVector::Zero(F.size());
  const CSparseMatrix E = gen.E.cast<Complex>();
  const CSparseMatrix P = lambda * E - gen.J.cast<Complex>();
  ComplexLU lu;
  factor_or_throw(lu, P, lambda);
  const CVector rhs = E * F;
  CVector V = lu.solve(rhs);
  V += lu.solve(CVector(rhs - P * V));  // one step of refinement
  const double growth = V.norm() / F.norm();
  if (!std::isfinite(growth) || growth > kSingularGrowth) {
    const double dist = std::isfinite(growth) ? 1.0 / growth : 0.0;
    throw SingularSystemError("shifted system is near-singular at lambda = " + shift_text(lambda) +
                                  " (distance to spectrum ~ " + std::to_string(dist) + ")",
                              dist);
  }
  return V;
}

Complex Resolvent::reduced_coefficient(Complex lambda) const {
  const auto& grid = model_.grid();
  Complex alpha = 0.0, G = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double inv = 1.0 / grid.spacing[k];
    alpha = (alpha * inv + 1.0) / (lambda + inv);
    G += grid.weights[k] * alpha;
  }
  return model_.ell() + lambda * G;
}

CVector Resolvent::reduced(Complex lambda, const CVector& F) const {
  const int n = model_.n();
  const int K = model_.history_nodes();
  const auto& grid = model_.grid();
  const auto& ops = model_.ops();
  if (F.size() != model_.dimension()) {
    throw ShapeError("resolvent: right-hand side has wrong dimension");
  }
  const CVector f1 = F.head(n), f2 = F.segment(n, n);

  std::vector<Complex> alpha(K);
  CMatrix beta(n, K);
  Complex a_prev = 0.0, G = 0.0;
  CVector b_prev = CVector::Zero(n), bsum = CVector::Zero(n);
  for (int k = 0; k < K; ++k) {
    const double inv = 1.0 / grid.spacing[k];
    const Complex denom = lambda + inv;
    if (std::abs(denom) < 1e-300) {
      throw SingularSystemError("history recursion is singular at lambda = " + shift_text(lambda), 0.0);
    }
    alpha[k] = (a_prev * inv + 1.0) / denom;
    beta.col(k) = (b_prev * inv + F.segment((2 + k) * n, n)) / denom;
    a_prev = alpha[k];
    b_prev = beta.col(k);
    G += grid.weights[k] * alpha[k];
    bsum += grid.weights[k] * beta.col(k);
  }

  const CSparseMatrix Kc = ops.K.cast<Complex>();
  const CSparseMatrix Mc = ops.M_total.cast<Complex>();
  const CSparseMatrix R = (lambda * lambda) * Mc + (model_.ell() + lambda * G) * Kc;
  const CVector rhs = Mc * (lambda * f1 + f2) + G * (Kc * f1) - Kc * bsum;
  ComplexLU lu;
  factor_or_throw(lu, R, lambda);
  const CVector u = lu.solve(rhs);
  const CVector v = lambda * u - f1;

  CVector V(model_.dimension());
  V.head(n) = u;
  V.segment(n, n) = v;
  for (int k = 0; k < K; ++k) V.segment((2 + k) * n, n) = alpha[k] * v + beta.col(k);
  return V;
}

ResolventNorm::ResolventNorm(const DafermosModel& model, int dense_limit, int lanczos_dim,
                             double lanczos_tolerance)
    : model_(model), dense_(model.dimension() < dense_limit), lanczos_dim_(lanczos_dim),
      tol_(lanczos_tolerance) {
  if (dense_) {
    const Matrix G = Matrix(model.gram());
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) throw Error("H Gram matrix is not positive definite");
    L_ = llt.matrixL();
    // L^T A L^{-T}
    const Matrix A = model.generator().dense();
    const Matrix LtA = L_.transpose() * A;
    A_ = L_.triangularView<Eigen::Lower>().solve(LtA.transpose()).transpose();
  } else {
    gram_chol_.compute(model.gram());
    if (gram_chol_.info() != Eigen::Success) throw Error("H Gram matrix is not positive definite");
    const int dim = model.dimension();
    start_.resize(dim);
    for (int i = 0; i < dim; ++i) {
      // fixed, smooth, nowhere-vanishing pattern; identical for beta and -beta
      start_(i) = 1.0 + 0.5 * std::sin(0.7 * i + 0.3);
    }
  }
}

double ResolventNorm::operator()(double beta) const { return dense_ ? svd_norm(beta) : lanczos_norm(beta); }

double ResolventNorm::svd_norm(double beta) const {
  const int dim = static_cast<int>(A_.rows());
  CMatrix B = -A_.cast<Complex>();
  B.diagonal().array() += Complex(0.0, beta);
  Eigen::BDCSVD<CMatrix> svd(B);
  const double smin = svd.singularValues()(dim - 1);
  return smin > 0.0 ? 1.0 / smin : std::numeric_limits<double>::infinity();
}

double ResolventNorm::lanczos_norm(double beta) const {
  const auto& gen = model_.generator();
  const int dim = gen.dimension();
  const CSparseMatrix E = gen.E.cast<Complex>();
  const CSparseMatrix G = model_.gram().cast<Complex>();
  const CSparseMatrix P = Complex(0.0, beta) * E - gen.J.cast<Complex>();
  ComplexLU lu;
  factor_or_throw(lu, P, Complex(0.0, beta));

  // S = T* T in the H inner product, T = P^{-1} E, T* = G^{-1} T^H G
  const auto apply = [&](const CVector& x) -> CVector {
    const CVector y = lu.solve(E * x);
    const CVector z = lu.adjoint().solve(G * y);
    const CVector ez = E * z;
    CVector out(dim);
    out.real() = gram_chol_.solve(Vector(ez.real()));
    out.imag() = gram_chol_.solve(Vector(ez.imag()));
    return out;
  };
  const auto hdot = [&](const CVector& x, const CVector& y) { return x.dot(G * y); };

  const int m = std::min(lanczos_dim_, dim);
  std::vector<CVector> Q;
  std::vector<double> alpha, offdiag;
  CVector q = start_ / std::sqrt(hdot(start_, start_).real());
  double theta_prev = 0.0, theta = 0.0;
  for (int j = 0; j < m; ++j) {
    Q.push_back(q);
    CVector w = apply(q);
    alpha.push_back(hdot(q, w).real());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : Q) w -= hdot(qi, w) * qi;
    }
    const double b = std::sqrt(std::max(0.0, hdot(w, w).real()));

    Matrix T = Matrix::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) {
      T(i, i) = alpha[i];
      if (i < j) T(i, i + 1) = T(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
    theta = es.eigenvalues()(j);
    if (j > 2 && std::abs(theta - theta_prev) <= tol_ * theta) break;
    theta_prev = theta;
    if (b <= 1e-14 * std::abs(theta)) break;  // invariant subspace
    offdiag.push_back(b);
    q = w / b;
  }
  return std::sqrt(theta);
}

namespace {

SweepResult evaluate(const ResolventNorm& norm, std::vector<double> betas, unsigned threads) {
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  SweepResult r;
  r.beta = betas;
  r.norm.assign(betas.size(), 0.0);
  r.method = norm.uses_svd() ? "svd" : "lanczos";
  const auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < betas.size(); i += stride) {
      try {
        r.norm[i] = norm(betas[i]);
      } catch (const SingularSystemError&) {
        r.norm[i] = std::numeric_limits<double>::infinity();
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  r.finite = true;
  r.sup = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!std::isfinite(r.norm[i])) r.finite = false;
    if (r.norm[i] > r.sup) {
      r.sup = r.norm[i];
      r.argmax = betas[i];
    }
  }
  return r;
}

}  // namespace

SweepResult resolvent_sweep(const DafermosModel& model, const std::vector<double>& betas,
                            const SweepOptions& opt) {
  if (betas.empty()) throw ConfigError("resolvent sweep grid is empty");
  const ResolventNorm norm(model, opt.dense_limit, opt.lanczos_dim, opt.lanczos_tolerance);
  return evaluate(norm, betas, opt.threads);
}

SweepResult resolvent_sweep(const DafermosModel& model, const SweepOptions& opt) {
  if (opt.points <= 0) throw ConfigError("resolvent sweep needs a positive number of points");
  if (!(opt.beta_max > 0.0)) throw ConfigError("resolvent sweep needs beta_max > 0");
  const double lo = std::min(opt.beta_min, 0.5 * opt.beta_max);
  std::vector<double> positive;
  for (int i = 0; i < opt.points; ++i) {
    const double t = opt.points == 1 ? 1.0 : static_cast<double>(i) / (opt.points - 1);
    positive.push_back(lo * std::pow(opt.beta_max / lo, t));
  }
  positive.back() = opt.beta_max;

  const ResolventNorm norm(model, opt.dense_limit, opt.lanczos_dim, opt.lanczos_tolerance);
  const auto mirrored = [](const std::vector<double>& pos) {
    std::vector<double> all{0.0};
    for (double b : pos) {
      all.push_back(b);
      all.push_back(-b);
    }
    return all;
  };
  SweepResult r = evaluate(norm, mirrored(positive), opt.threads);

  for (int pass = 0; pass < opt.refine_passes; ++pass) {
    // local maxima of r on beta > 0
    std::vector<double> extra;
    std::vector<std::pair<double, double>> pos;
    for (std::size_t i = 0; i < r.beta.size(); ++i) {
      if (r.beta[i] > 0.0) pos.emplace_back(r.beta[i], r.norm[i]);
    }
    for (std::size_t i = 1; i + 1 < pos.size(); ++i) {
      if (pos[i].second >= pos[i - 1].second && pos[i].second >= pos[i + 1].second) {
        extra.push_back(0.5 * (pos[i - 1].first + pos[i].first));
        extra.push_back(0.5 * (pos[i].first + pos[i + 1].first));
      }
    }
    if (extra.empty()) break;
    SweepResult more = evaluate(norm, mirrored(extra), opt.threads);
    std::vector<std::pair<double, double>> merged;
    for (std::size_t i = 0; i < r.beta.size(); ++i) merged.emplace_back(r.beta[i], r.norm[i]);
    for (std::size_t i = 0; i < more.beta.size(); ++i) {
      if (more.beta[i] != 0.0) merged.emplace_back(more.beta[i], more.norm[i]);
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [](const auto& a, const auto& b) { return a.first == b.first; }),
                 merged.end());
    r.beta.clear();
    r.norm.clear();
    r.finite = true;
    r.sup = 0.0;
    for (const auto& [b, v] : merged) {
      r.beta.push_back(b);
      r.norm.push_back(v);
      if (!std::isfinite(v)) r.finite = false;
      if (v > r.sup) {
        r.sup = v;
        r.argmax = b;
      }
    }
  }
  return r;
}

}  // namespace memwave
