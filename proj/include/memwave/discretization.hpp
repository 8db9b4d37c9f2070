#pragma once

#include <filesystem>
#include <vector>

#include "memwave/types.hpp"

namespace memwave {

/// Uniform grid on [0, 1]. Node 0 carries the Dirichlet condition, node N the
/// dynamic boundary.
struct Mesh {
  int n_cells = 0;
  double h = 0.0;
  std::vector<double> nodes;

  /// Number of unknowns after eliminating the Dirichlet node.
  int n_unknowns() const noexcept { return n_cells; }
  /// Coordinates of the unknowns x_1 .. x_N.
  Vector unknown_coordinates() const;
};

Mesh build_mesh(int n_cells);

/**
 * Piecewise-linear operators on the Dirichlet-constrained space. Unknown i
 * corresponds to node i + 1, so the last unknown is the boundary node.
 */
struct DiscreteOperators {
  Mesh mesh;
  SparseMatrix K;        // stiffness
  SparseMatrix M;        // consistent mass
  SparseMatrix M_total;  // M plus the boundary point mass
  double boundary_mass = 1.0;

  int n() const noexcept { return mesh.n_unknowns(); }
  int boundary_index() const noexcept { return n() - 1; }

  /// Boundary nodal value.
  double trace(const Vector& u) const { return u(boundary_index()); }

  /// Discrete Laplacian on interior unknowns, M_II (lap u)_I = -(K u)_I,
  /// extended by zero at the boundary unknown.
  Vector interior_laplacian(const Vector& u) const;

  /// Weak normal derivative at the boundary: (K u)_N + M_{N,I} (lap u)_I.
  /// With this choice (K u, phi) = flux(u) phi_N - (M lap u, phi) holds
  /// exactly for every discrete u, phi.
  double flux(const Vector& u) const;
};

DiscreteOperators assemble(const Mesh& mesh);

/// Smallest B_h with trace(u)^2 <= B_h^2 (K u, u), i.e. sqrt(e_N^T K^{-1} e_N).
double trace_constant(const DiscreteOperators& ops);

/// Nodal interpolant of f at the unknowns.
template <class F>
Vector interpolate(const Mesh& mesh, F&& f) {
  Vector u(mesh.n_unknowns());
  for (int i = 0; i < mesh.n_unknowns(); ++i) u(i) = f(mesh.nodes[i + 1]);
  return u;
}

/// Writes a sparse matrix in MatrixMarket coordinate format.
void write_matrix_market(const SparseMatrix& A, const std::filesystem::path& path);

}  // namespace memwave
