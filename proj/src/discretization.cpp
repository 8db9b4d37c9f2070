#include "memwave/discretization.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/SparseCholesky>

namespace memwave {

Vector Mesh::unknown_coordinates() const {
  Vector x(n_unknowns());
  for (int i = 0; i < n_unknowns(); ++i) x(i) = nodes[i + 1];
  return x;
}

Mesh build_mesh(int n_cells) {
  if (n_cells < 2) throw ConfigError("mesh needs n_cells >= 2 (got " + std::to_string(n_cells) + ")");
  Mesh m;
  m.n_cells = n_cells;
  m.h = 1.0 / n_cells;
  m.nodes.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) m.nodes[i] = static_cast<double>(i) / n_cells;
  m.nodes.back() = 1.0;
  return m;
}

DiscreteOperators assemble(const Mesh& mesh) {
  const int n = mesh.n_unknowns();
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(4 * n);
  mt.reserve(4 * n);
  for (int e = 0; e < mesh.n_cells; ++e) {
    const double h = mesh.nodes[e + 1] - mesh.nodes[e];
    const int dofs[2] = {e - 1, e};  // node e -> unknown e - 1
    const double ke[2][2] = {{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}};
    const double me[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (dofs[a] < 0 || dofs[b] < 0) continue;
        kt.emplace_back(dofs[a], dofs[b], ke[a][b]);
        mt.emplace_back(dofs[a], dofs[b], me[a][b]);
      }
    }
  }
  DiscreteOperators ops;
  ops.mesh = mesh;
  ops.K.resize(n, n);
  ops.M.resize(n, n);
  ops.K.setFromTriplets(kt.begin(), kt.end());
  ops.M.setFromTriplets(mt.begin(), mt.end());
  ops.M_total = ops.M;
  ops.M_total.coeffRef(n - 1, n - 1) += ops.boundary_mass;
  ops.K.makeCompressed();
  ops.M.makeCompressed();
  ops.M_total.makeCompressed();
  return ops;
}

Vector DiscreteOperators::interior_laplacian(const Vector& u) const {
  const int ni = n() - 1;
  Vector lap = Vector::Zero(n());
  if (ni == 0) return lap;
  const SparseMatrix Mii = M.topLeftCorner(ni, ni);
  Eigen::SimplicialLDLT<SparseMatrix> chol(Mii);
  const Vector Ku = K * u;
  lap.head(ni) = chol.solve(-Ku.head(ni));
  return lap;
}

double DiscreteOperators::flux(const Vector& u) const {
  const Vector Ku = K * u;
  const Vector lap = interior_laplacian(u);
  // row N of M applied to lap (lap_N = 0)
  double coupling = 0.0;
  for (SparseMatrix::InnerIterator it(M, boundary_index()); it; ++it) {
    coupling += it.value() * lap(it.row());
  }
  return Ku(boundary_index()) + coupling;
}

double trace_constant(const DiscreteOperators& ops) {
  Eigen::SimplicialLDLT<SparseMatrix> chol(ops.K);
  Vector e = Vector::Zero(ops.n());
  e(ops.boundary_index()) = 1.0;
  return std::sqrt(e.dot(chol.solve(e)));
}

void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::scientific << std::setprecision(17);
  for (int c = 0; c < A.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace memwave
