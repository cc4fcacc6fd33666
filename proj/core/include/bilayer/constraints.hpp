#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "bilayer/dkq.hpp"
#include "bilayer/mesh.hpp"

namespace bilayer {

// Linearized nodal isometry condition [grad v]^T G + G^T [grad v] = 0 at one
// node, acting on the six gradient dofs (d1v1,d1v2,d1v3, d2v1,d2v2,d2v3).
// Rows are the (1,1), (1,2), (2,2) entries of the symmetric residual.
struct NodalConstraintBlock {
  Eigen::Matrix<double, 3, 6> B;
  int rank = 3;
  Eigen::Matrix<double, 6, 3> kernel;  // orthonormal basis of admissible gradients
};

// G is the 3x2 deformation gradient at the node (columns d1y, d2y).
// Rank-deficient G is detected with a singular-value tolerance; the kernel
// then keeps the three least-violating directions.
NodalConstraintBlock build_constraint_block(const Eigen::Matrix<double, 3, 2>& G,
                                            double rank_tol = 1e-8);

Eigen::Matrix<double, 3, 2> nodal_deformation_gradient(const Eigen::VectorXd& y, int node);

// Stacked sparse constraint matrix: 3 rows per non-clamped node, acting on
// the full 9N dof vector.  Used for verification; the solver works with the
// per-node kernels directly.
Eigen::SparseMatrix<double> build_constraints(const QuadMesh& mesh,
                                              const Eigen::VectorXd& y,
                                              const std::vector<bool>& clamped);

}  // namespace bilayer
