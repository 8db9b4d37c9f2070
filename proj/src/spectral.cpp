#include "memwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <lapacke.h>

namespace memwave {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable:
      return "stable";
    case Verdict::unstable:
      return "unstable";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify_abscissa(double abscissa) {
  if (abscissa < -kAxisTolerance) return Verdict::stable;
  if (abscissa > kAxisTolerance) return Verdict::unstable;
  return Verdict::inconclusive;
}

namespace {

void summarize(EigenReport& r) {
  r.abscissa = -std::numeric_limits<double>::infinity();
  r.axis_margin = std::numeric_limits<double>::infinity();
  r.max_imag = 0.0;
  for (const auto& z : r.eigenvalues) {
    r.abscissa = std::max(r.abscissa, z.real());
    r.axis_margin = std::min(r.axis_margin, std::abs(z.real()));
    r.max_imag = std::max(r.max_imag, std::abs(z.imag()));
  }
  r.verdict = r.converged && r.eigenvalues.size() > 0 ? classify_abscissa(r.abscissa)
                                                       : Verdict::inconclusive;
}

}  // namespace

EigenReport eigen_certificate(const Matrix& A) {
  if (A.rows() != A.cols()) throw ShapeError("eigen_certificate needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Matrix work = A;
  std::vector<double> wr(n), wi(n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, nullptr, 1);
  EigenReport r;
  r.method = "dgeev";
  r.converged = info == 0;
  if (info < 0) throw Error("dgeev: illegal argument " + std::to_string(-info));
  r.eigenvalues.resize(n);
  for (lapack_int i = 0; i < n; ++i) r.eigenvalues(i) = {wr[i], wi[i]};
  if (!r.converged) r.eigenvalues.resize(0);
  summarize(r);
  return r;
}

EigenReport arnoldi_certificate(const GeneratorMatrix& gen, const ArnoldiOptions& opt) {
  const int dim = gen.dimension();
  const int m = std::min(opt.krylov_dim, dim);
  std::vector<double> betas = opt.betas;
  if (betas.empty()) {
    betas.push_back(0.0);
    for (double b = 1.0; b <= opt.beta_max * (1.0 + 1e-12); b *= 2.0) betas.push_back(b);
  }
  const CSparseMatrix E = gen.E.cast<Complex>();
  const CSparseMatrix J = gen.J.cast<Complex>();

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  CVector start(dim);
  for (int i = 0; i < dim; ++i) start(i) = normal(rng);

  EigenReport r;
  r.method = "shift-invert arnoldi";
  r.partial = true;
  std::vector<Complex> found;
  for (double beta : betas) {
    const Complex sigma(0.0, beta);
    const CSparseMatrix shifted = J - sigma * E;
    Eigen::SparseLU<CSparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) continue;  // shift sits on an eigenvalue

    CMatrix V = CMatrix::Zero(dim, m + 1);
    CMatrix H = CMatrix::Zero(m + 1, m);
    V.col(0) = start / start.norm();
    int steps = m;
    for (int j = 0; j < m; ++j) {
      CVector w = lu.solve(E * V.col(j));
      for (int pass = 0; pass < 2; ++pass) {  // classical Gram-Schmidt, twice
        const CVector h = V.leftCols(j + 1).adjoint() * w;
        w -= V.leftCols(j + 1) * h;
        H.col(j).head(j + 1) += h;
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) < 1e-14) {
        steps = j + 1;
        break;
      }
      V.col(j + 1) = w / H(j + 1, j);
    }
    Eigen::ComplexEigenSolver<CMatrix> ces(H.topLeftCorner(steps, steps));
    if (ces.info() != Eigen::Success) {
      r.converged = false;
      continue;
    }
    for (int i = 0; i < steps; ++i) {
      const Complex theta = ces.eigenvalues()(i);
      if (std::abs(theta) < 1e-300) continue;
      const CVector y = V.leftCols(steps) * ces.eigenvectors().col(i);
      const Complex lambda = sigma + 1.0 / theta;
      const double res = (J * y - lambda * (E * y)).norm();
      const double scale = (std::abs(lambda) + 1.0) * (E * y).norm();
      if (res <= opt.tolerance * scale) found.push_back(lambda);
    }
  }
  // shifts overlap: merge duplicates
  std::vector<Complex> unique;
  for (const auto& z : found) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Complex& u) {
      return std::abs(u - z) <= 1e-8 * (1.0 + std::abs(z));
    });
    if (!dup) unique.push_back(z);
  }
  r.eigenvalues = Eigen::Map<CVector>(unique.data(), static_cast<Eigen::Index>(unique.size()));
  summarize(r);
  return r;
}

EigenReport spectrum(const GeneratorMatrix& gen, int dense_limit, const ArnoldiOptions& opt) {
  if (gen.dimension() <= dense_limit) return eigen_certificate(gen.dense());
  return arnoldi_certificate(gen, opt);
}

}  // namespace memwave
