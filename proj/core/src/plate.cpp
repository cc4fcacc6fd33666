#include "bilayer/plate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bilayer {

PlateField flat_state(const QuadMesh& mesh) {
  PlateField y = Eigen::VectorXd::Zero(kDofsPerNode * mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    y(dof_value(n, 0)) = mesh.nodes[n].x();
    y(dof_value(n, 1)) = mesh.nodes[n].y();
    y(dof_grad(n, 0, 0)) = 1.0;
    y(dof_grad(n, 1, 1)) = 1.0;
  }
  return y;
}

Eigen::VectorXd nodal_values(const PlateField& y, int num_nodes) {
  Eigen::VectorXd v(3 * num_nodes);
  for (int n = 0; n < num_nodes; ++n)
    for (int c = 0; c < 3; ++c) v(3 * n + c) = y(dof_value(n, c));
  return v;
}

SplitState initial_state(const QuadMesh& mesh) {
  SplitState st;
  st.y = flat_state(mesh);
  st.s = nodal_values(st.y, mesh.num_nodes());
  return st;
}

PlateOperators::PlateOperators(const QuadMesh& mesh, const Eigen::VectorXd& mu_per_element,
                               const Eigen::VectorXd& alpha_per_element,
                               const std::vector<bool>& clamped_nodes)
    : mesh_(&mesh), table_(mesh), mu_(mu_per_element), alpha_(alpha_per_element),
      clamped_(clamped_nodes) {
  if (static_cast<int>(clamped_.size()) != mesh.num_nodes())
    throw std::invalid_argument("clamped mask size mismatch");
  K_mu_ = assemble_bending_matrix(mesh, table_, mu_);
  K_unit_ = assemble_bending_matrix(mesh, table_, Eigen::VectorXd::Ones(mesh.num_elements()));
  M_dkq_ = assemble_dkq_mass(mesh, table_);
  M_lump_ = lumped_mass_diagonal(mesh, table_);

  node_to_free_.assign(mesh.num_nodes(), -1);
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    if (!clamped_[n]) {
      node_to_free_[n] = static_cast<int>(free_nodes_.size());
      free_nodes_.push_back(n);
    }
  }
  if (free_nodes_.empty()) throw std::invalid_argument("all nodes are clamped");

  // Free-node block adjacency from element connectivity.
  const int nf = static_cast<int>(free_nodes_.size());
  std::vector<std::vector<int>> adj(nf);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int a = 0; a < 4; ++a) {
      const int fj = node_to_free_[el[a]];
      if (fj < 0) continue;
      for (int b = 0; b < 4; ++b) {
        const int fi = node_to_free_[el[b]];
        if (fi >= 0) adj[fj].push_back(fi);
      }
    }
  }
  col_blocks_.resize(nf);
  K_blocks_.resize(nf);
  for (int j = 0; j < nf; ++j) {
    std::sort(adj[j].begin(), adj[j].end());
    adj[j].erase(std::unique(adj[j].begin(), adj[j].end()), adj[j].end());
    col_blocks_[j] = std::move(adj[j]);
    K_blocks_[j].assign(col_blocks_[j].size(), Eigen::Matrix<double, 9, 9>::Zero());
  }

  // Scatter K_mu into the block storage.
  for (int col = 0; col < K_mu_.outerSize(); ++col) {
    const int nj = col / kDofsPerNode, cj = col % kDofsPerNode;
    const int fj = node_to_free_[nj];
    if (fj < 0) continue;
    for (SparseMat::InnerIterator it(K_mu_, col); it; ++it) {
      const int ni = static_cast<int>(it.row()) / kDofsPerNode;
      const int ci = static_cast<int>(it.row()) % kDofsPerNode;
      const int fi = node_to_free_[ni];
      if (fi < 0) continue;
      auto pos = std::lower_bound(col_blocks_[fj].begin(), col_blocks_[fj].end(), fi);
      K_blocks_[fj][pos - col_blocks_[fj].begin()](ci, cj) += it.value();
    }
  }
  kernels_.resize(nf);
}

double PlateOperators::l2_norm(const PlateField& w) const {
  return std::sqrt(std::max(0.0, w.dot(M_dkq_ * w)));
}

double PlateOperators::hessian_norm(const PlateField& w) const {
  return std::sqrt(std::max(0.0, w.dot(K_unit_ * w)));
}

void PlateOperators::prepare(double tau, double epsilon) {
  if (tau == prep_tau_ && epsilon == prep_eps_) return;
  const int nf = static_cast<int>(free_nodes_.size());
  A_blocks_ = K_blocks_;
  for (int j = 0; j < nf; ++j) {
    for (size_t k = 0; k < col_blocks_[j].size(); ++k) {
      A_blocks_[j][k] *= tau;
      if (col_blocks_[j][k] == j) {
        const int n = free_nodes_[j];
        for (int c = 0; c < 3; ++c)
          A_blocks_[j][k](c, c) += tau / epsilon * M_lump_(dof_value(n, c));
      }
    }
  }
  if (!pattern_ready_) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < nf; ++j)
      for (int i : col_blocks_[j])
        for (int c = 0; c < 6; ++c)
          for (int r = 0; r < 6; ++r) trips.emplace_back(6 * i + r, 6 * j + c, 1.0);
    A_reduced_.resize(6 * nf, 6 * nf);
    A_reduced_.setFromTriplets(trips.begin(), trips.end());
    A_reduced_.makeCompressed();
    ldlt_.analyzePattern(A_reduced_);
    pattern_ready_ = true;
  }
  prep_tau_ = tau;
  prep_eps_ = epsilon;
  factor_valid_ = false;
}

PlateField PlateOperators::solve_step(const PlateField& y, const Eigen::VectorXd& rhs,
                                      double tau, double epsilon, PlateStepStats* stats) {
  prepare(tau, epsilon);
  const int nf = static_cast<int>(free_nodes_.size());

  blocks_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Eigen::Matrix<double, 3, 2> G = nodal_deformation_gradient(y, free_nodes_[f]);
    const Vec3 g1 = G.col(0), g2 = G.col(1);
    Eigen::Matrix<double, 3, 6>& B = blocks_[f];
    B.setZero();
    B.block<1, 3>(0, 0) = 2.0 * g1.transpose();
    B.block<1, 3>(1, 3) = 2.0 * g2.transpose();
    B.block<1, 3>(2, 0) = g2.transpose();
    B.block<1, 3>(2, 3) = g1.transpose();
    // admissible gradients are infinitesimal rotations w x G when G has rank 2
    const double s2 = g1.cross(g2).squaredNorm();
    if (s2 > 1e-16 * g1.squaredNorm() * g2.squaredNorm()) {
      Eigen::Matrix<double, 6, 3>& N = kernels_[f];
      for (int i = 0; i < 3; ++i) {
        const Vec3 e = Vec3::Unit(i);
        N.block<3, 1>(0, i) = e.cross(g1);
        N.block<3, 1>(3, i) = e.cross(g2);
      }
      // modified Gram-Schmidt for solver conditioning
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < i; ++j) N.col(i) -= N.col(j).dot(N.col(i)) * N.col(j);
        N.col(i).normalize();
      }
    } else {
      kernels_[f] = build_constraint_block(G).kernel;
    }
  }

  // Reduced matrix: blocks Zi^T A Zj with Z = diag(I3, kernel).
  double* vals = A_reduced_.valuePtr();
  const int* outer = A_reduced_.outerIndexPtr();
  for (int j = 0; j < nf; ++j) {
    const auto& Nj = kernels_[j];
    for (size_t k = 0; k < col_blocks_[j].size(); ++k) {
      const int i = col_blocks_[j][k];
      const auto& A = A_blocks_[j][k];
      const auto& Ni = kernels_[i];
      Eigen::Matrix<double, 9, 6> T;
      T.leftCols<3>() = A.leftCols<3>();
      T.rightCols<3>().noalias() = A.rightCols<6>() * Nj;
      Eigen::Matrix<double, 6, 6> R;
      R.topRows<3>() = T.topRows<3>();
      R.bottomRows<3>().noalias() = Ni.transpose() * T.bottomRows<6>();
      for (int c = 0; c < 6; ++c) {
        double* dst = vals + outer[6 * j + c] + 6 * k;
        for (int r = 0; r < 6; ++r) dst[r] = R(r, c);
      }
    }
  }

  Eigen::VectorXd rr(6 * nf);
  for (int f = 0; f < nf; ++f) {
    const int n = free_nodes_[f];
    for (int c = 0; c < 3; ++c) rr(6 * f + c) = rhs(dof_value(n, c));
    Eigen::Matrix<double, 6, 1> g;
    for (int d = 0; d < 2; ++d)
      for (int c = 0; c < 3; ++c) g(3 * d + c) = rhs(dof_grad(n, d, c));
    rr.segment<3>(6 * f + 3) = kernels_[f].transpose() * g;
  }

  // The constraint kernels rotate slowly between steps, so the factorization
  // of an earlier reduced matrix stays an excellent preconditioner; CG picks
  // up the drift and the factors are refreshed only when it stalls.
  auto factorize_now = [&]() {
    ldlt_.factorize(A_reduced_);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("plate step factorization failed (constraint rank issue?)");
    factor_valid_ = true;
    ++factorizations_;
  };
  // refresh proactively once the drift forces CG to work too hard
  if (!factor_valid_ || last_pcg_iters_ > 3) factorize_now();
  Eigen::VectorXd q = ldlt_.solve(rr);
  const double target = 1e-9 * (1.0 + rr.cwiseAbs().maxCoeff());
  Eigen::VectorXd resid = rr - A_reduced_ * q;
  last_pcg_iters_ = 0;
  if (resid.cwiseAbs().maxCoeff() > target) {
    Eigen::VectorXd z = ldlt_.solve(resid);
    Eigen::VectorXd pdir = z;
    double rz = resid.dot(z);
    const int max_iters = 40;
    bool breakdown = !(rz > 0.0) || !std::isfinite(rz);
    for (int it = 0; it < max_iters && !breakdown && resid.cwiseAbs().maxCoeff() > target;
         ++it) {
      Eigen::VectorXd Ap = A_reduced_ * pdir;
      const double pAp = pdir.dot(Ap);
      if (!(pAp > 0.0) || !std::isfinite(pAp)) {
        breakdown = true;
        break;
      }
      const double alpha = rz / pAp;
      q += alpha * pdir;
      resid -= alpha * Ap;
      z = ldlt_.solve(resid);
      const double rz_next = resid.dot(z);
      if (!std::isfinite(rz_next) || rz_next < 0.0) {
        breakdown = true;
        break;
      }
      pdir = z + (rz_next / rz) * pdir;
      rz = rz_next;
      ++pcg_iterations_;
      ++last_pcg_iters_;
    }
    if (breakdown || resid.cwiseAbs().maxCoeff() > target) {
      factorize_now();
      q = ldlt_.solve(rr);
      last_pcg_iters_ = 0;
    }
  }
  const double solve_res = (A_reduced_ * q - rr).cwiseAbs().maxCoeff();
  if (!(solve_res <= 1e-8 * (1.0 + rr.cwiseAbs().maxCoeff())))
    throw std::runtime_error("plate step solve residual too large: " +
                             std::to_string(solve_res));

  PlateField v = Eigen::VectorXd::Zero(y.size());
  for (int f = 0; f < nf; ++f) {
    const int n = free_nodes_[f];
    for (int c = 0; c < 3; ++c) v(dof_value(n, c)) = q(6 * f + c);
    Eigen::Matrix<double, 6, 1> g = kernels_[f] * q.segment<3>(6 * f + 3);
    for (int d = 0; d < 2; ++d)
      for (int c = 0; c < 3; ++c) v(dof_grad(n, d, c)) = g(3 * d + c);
  }

  if (stats) {
    stats->solve_residual = solve_res;
    stats->velocity_max = v.cwiseAbs().maxCoeff();
    double cres = 0.0;
    for (int f = 0; f < nf; ++f) {
      const int n = free_nodes_[f];
      Eigen::Matrix<double, 6, 1> g;
      for (int d = 0; d < 2; ++d)
        for (int c = 0; c < 3; ++c) g(3 * d + c) = v(dof_grad(n, d, c));
      cres = std::max(cres, (blocks_[f] * g).cwiseAbs().maxCoeff());
    }
    stats->constraint_residual = cres;
  }
  return v;
}

namespace {

// (mu Delta_h y . nu(y), alpha theta)_h with both factors from the current y.
double coupling_energy_term(const PlateOperators& ops, const PlateField& y,
                            const TempField& theta) {
  const QuadMesh& mesh = ops.mesh();
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double mu_alpha = ops.mu()(e) * ops.alpha()(e);
    if (mu_alpha == 0.0) continue;
    const auto& el = mesh.elements[e];
    const DkqBasis& basis = ops.table().basis(e);
    const double w = basis.lump_weight();
    Eigen::Matrix<double, 12, 1> dofs[3];
    for (int comp = 0; comp < 3; ++comp)
      for (int ln = 0; ln < 4; ++ln)
        for (int k = 0; k < 3; ++k)
          dofs[comp](3 * ln + k) = y(scalar_global_dof(el[ln], k, comp));
    for (int c = 0; c < 4; ++c) {
      const int n = el[c];
      Vec3 lap;
      for (int comp = 0; comp < 3; ++comp)
        lap(comp) = basis.laplacian_at_corners().row(c) * dofs[comp];
      s += w * mu_alpha * theta(n) * lap.dot(deformed_normal(y, n));
    }
  }
  return s;
}

// (mu (alpha theta)^2, 1)_h
double theta_square_term(const PlateOperators& ops, const TempField& theta) {
  const QuadMesh& mesh = ops.mesh();
  double s = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double mu_a2 = ops.mu()(e) * ops.alpha()(e) * ops.alpha()(e);
    if (mu_a2 == 0.0) continue;
    const double w = ops.table().basis(e).lump_weight();
    for (int c = 0; c < 4; ++c) {
      const double th = theta(mesh.elements[e][c]);
      s += w * mu_a2 * th * th;
    }
  }
  return s;
}

double lumped_gap_sq(const PlateOperators& ops, const PlateField& y,
                     const Eigen::VectorXd& s) {
  const int num_nodes = ops.mesh().num_nodes();
  double acc = 0.0;
  for (int n = 0; n < num_nodes; ++n) {
    const double w = ops.lumped_diagonal()(dof_value(n, 0));
    for (int c = 0; c < 3; ++c) {
      const double d = y(dof_value(n, c)) - s(3 * n + c);
      acc += w * d * d;
    }
  }
  return acc;
}

}  // namespace

double bending_energy(const PlateOperators& ops, const PlateField& y,
                      const TempField& theta) {
  const double quad = y.dot(ops.bending_matrix() * y);
  const double coupling = coupling_energy_term(ops, y, theta);
  const double square = theta_square_term(ops, theta);
  return quad / 12.0 - coupling / 6.0 + square / 6.0;
}

double semi_implicit_functional(const PlateOperators& ops, const PlateField& y,
                                const PlateField& y_ref, const Eigen::VectorXd& s,
                                const TempField& theta, double epsilon) {
  const double quad = y.dot(ops.bending_matrix() * y);
  Eigen::VectorXd coupling = assemble_coupling_vector(
      ops.mesh(), ops.table(), ops.mu(), ops.alpha(), theta, y_ref);
  const double gap = lumped_gap_sq(ops, y, s);
  const double square = theta_square_term(ops, theta);
  return quad / 12.0 + gap / (12.0 * epsilon) - coupling.dot(y) / 6.0 + square / 6.0;
}

SplitState plate_step(PlateOperators& ops, const SplitState& state,
                      const TempField& theta_next, double tau, double epsilon,
                      const Obstacle& obstacle, PlateStepStats* stats,
                      PlateScratch* scratch) {
  if (!(tau > 0.0) || !(epsilon > 0.0))
    throw std::invalid_argument("tau and epsilon must be positive");
  const QuadMesh& mesh = ops.mesh();
  const int num_nodes = mesh.num_nodes();

  Eigen::VectorXd coupling = assemble_coupling_vector(mesh, ops.table(), ops.mu(),
                                                      ops.alpha(), theta_next, state.y);
  Eigen::VectorXd Ky = scratch && scratch->valid ? std::move(scratch->Ky)
                                                 : ops.bending_matrix() * state.y;
  // rhs = c_theta - K y - 1/eps M_h (y - s)
  Eigen::VectorXd rhs = coupling - Ky;
  for (int n = 0; n < num_nodes; ++n) {
    const double w = ops.lumped_diagonal()(dof_value(n, 0)) / epsilon;
    for (int c = 0; c < 3; ++c)
      rhs(dof_value(n, c)) -= w * (state.y(dof_value(n, c)) - state.s(3 * n + c));
  }

  PlateStepStats local;
  PlateStepStats* st = stats ? stats : &local;
  PlateField v = ops.solve_step(state.y, rhs, tau, epsilon, st);

  SplitState next;
  next.y = state.y + tau * v;
  next.s = project_obstacle(next.y, num_nodes, obstacle);

  // functional and energy values from reused products
  Eigen::VectorXd Kv = ops.bending_matrix() * v;
  Eigen::VectorXd Ky_next = Ky + tau * Kv;
  const double sq = theta_square_term(ops, theta_next);
  auto gap_sq = [&](const PlateField& y, const Eigen::VectorXd& s) {
    double acc = 0.0;
    for (int n = 0; n < num_nodes; ++n) {
      const double w = ops.lumped_diagonal()(dof_value(n, 0));
      for (int c = 0; c < 3; ++c) {
        const double d = y(dof_value(n, c)) - s(3 * n + c);
        acc += w * d * d;
      }
    }
    return acc;
  };
  st->functional_before = state.y.dot(Ky) / 12.0 + gap_sq(state.y, state.s) / (12.0 * epsilon) -
                          coupling.dot(state.y) / 6.0 + sq / 6.0;
  st->functional_after = next.y.dot(Ky_next) / 12.0 + gap_sq(next.y, state.s) / (12.0 * epsilon) -
                         coupling.dot(next.y) / 6.0 + sq / 6.0;
  st->energy_after = next.y.dot(Ky_next) / 12.0 -
                     coupling_energy_term(ops, next.y, theta_next) / 6.0 + sq / 6.0;
  // ||Dh2 v||^2 with unit coefficient: reuse K v when mu is uniform
  double vKv;
  if (ops.mu().size() > 0 && ops.mu().minCoeff() == ops.mu().maxCoeff())
    vKv = v.dot(Kv) / ops.mu()(0);
  else
    vKv = v.dot(ops.bending_unit() * v);
  st->stationarity = tau * (std::sqrt(std::max(0.0, v.dot(ops.dkq_mass() * v))) +
                            std::sqrt(std::max(0.0, vKv)));
  if (scratch) {
    scratch->Ky = std::move(Ky_next);
    scratch->valid = true;
  }
  return next;
}

double isometry_defect(const QuadMesh& mesh, const PlateField& y) {
  double defect = 0.0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    Eigen::Matrix<double, 3, 2> G = nodal_deformation_gradient(y, n);
    Eigen::Matrix2d r = G.transpose() * G - Eigen::Matrix2d::Identity();
    defect = std::max(defect, r.norm());
  }
  return defect;
}

}  // namespace bilayer
