#include "bilayer/constraints.hpp"

namespace bilayer {

Eigen::Matrix<double, 3, 2> nodal_deformation_gradient(const Eigen::VectorXd& y, int node) {
  Eigen::Matrix<double, 3, 2> G;
  for (int c = 0; c < 3; ++c) {
    G(c, 0) = y(dof_grad(node, 0, c));
    G(c, 1) = y(dof_grad(node, 1, c));
  }
  return G;
}

NodalConstraintBlock build_constraint_block(const Eigen::Matrix<double, 3, 2>& G,
                                            double rank_tol) {
  NodalConstraintBlock blk;
  const Eigen::Vector3d g1 = G.col(0), g2 = G.col(1);
  blk.B.setZero();
  // rows: (1,1) -> 2 g1.a1, (2,2) -> 2 g2.a2, (1,2) -> g2.a1 + g1.a2
  blk.B.block<1, 3>(0, 0) = 2.0 * g1.transpose();
  blk.B.block<1, 3>(1, 3) = 2.0 * g2.transpose();
  blk.B.block<1, 3>(2, 0) = g2.transpose();
  blk.B.block<1, 3>(2, 3) = g1.transpose();

  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 6>> svd(blk.B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  blk.rank = 0;
  const double tol = rank_tol * std::max(1.0, sv(0));
  for (int i = 0; i < 3; ++i)
    if (sv(i) > tol) ++blk.rank;
  blk.kernel = svd.matrixV().rightCols<3>();
  return blk;
}

Eigen::SparseMatrix<double> build_constraints(const QuadMesh& mesh,
                                              const Eigen::VectorXd& y,
                                              const std::vector<bool>& clamped) {
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<int> free_nodes;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (!clamped[n]) free_nodes.push_back(n);
  for (size_t f = 0; f < free_nodes.size(); ++f) {
    const int n = free_nodes[f];
    NodalConstraintBlock blk = build_constraint_block(nodal_deformation_gradient(y, n));
    for (int r = 0; r < 3; ++r) {
      for (int d = 0; d < 2; ++d)
        for (int c = 0; c < 3; ++c) {
          const double v = blk.B(r, 3 * d + c);
          if (v != 0.0) trips.emplace_back(3 * f + r, dof_grad(n, d, c), v);
        }
    }
  }
  Eigen::SparseMatrix<double> B(3 * free_nodes.size(), kDofsPerNode * mesh.num_nodes());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

}  // namespace bilayer
