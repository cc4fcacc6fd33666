#pragma once

#include <Eigen/Sparse>
#include <concepts>

#include "bilayer/dkq.hpp"
#include "bilayer/mesh.hpp"

namespace bilayer {

using SparseMat = Eigen::SparseMatrix<double>;

// (mu Dh^2 ., Dh^2 .) on the vector DKQ space, 9N x 9N, one identical block
// per deformation component in the node-major dof layout.
SparseMat assemble_bending_matrix(const QuadMesh& mesh, const ElementTable& table,
                                  const Eigen::VectorXd& mu_per_element);

// L2 mass of the reduced cubics, same block layout (used for stationarity norms).
SparseMat assemble_dkq_mass(const QuadMesh& mesh, const ElementTable& table);

// Diagonal of the vertex-lumped inner product; gradient dofs carry no mass.
Eigen::VectorXd lumped_mass_diagonal(const QuadMesh& mesh, const ElementTable& table);

// (phi, psi)_h = sum_T |T|/4 sum_corners phi|_T psi|_T for fields given by a
// callable (element, corner, node) -> double.
template <typename F, typename G>
  requires std::invocable<F, int, int, int> && std::invocable<G, int, int, int>
double lumped_inner_product(const QuadMesh& mesh, const ElementTable& table, F&& phi,
                            G&& psi) {
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double w = table.basis(e).lump_weight();
    for (int c = 0; c < 4; ++c) {
      const int n = mesh.elements[e][c];
      s += w * phi(e, c, n) * psi(e, c, n);
    }
  }
  return s;
}

// Convenience overload for nodal (Q1-type) scalar fields.
double lumped_inner_product(const QuadMesh& mesh, const ElementTable& table,
                            const Eigen::VectorXd& phi, const Eigen::VectorXd& psi);

// Right-hand side of the plate step: w -> (mu Delta_h w . [d1h y x d2h y], alpha theta)_h
// with the cross product read from the nodal gradient dofs of y.
Eigen::VectorXd assemble_coupling_vector(const QuadMesh& mesh, const ElementTable& table,
                                         const Eigen::VectorXd& mu_per_element,
                                         const Eigen::VectorXd& alpha_per_element,
                                         const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& y);

// Nodal cross product d1h y x d2h y at one node.
Vec3 deformed_normal(const Eigen::VectorXd& y, int node);

}  // namespace bilayer
