#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <vector>

#include "bilayer/assembly.hpp"
#include "bilayer/constraints.hpp"
#include "bilayer/dkq.hpp"
#include "bilayer/heat.hpp"
#include "bilayer/mesh.hpp"
#include "bilayer/obstacle.hpp"

namespace bilayer {

using PlateField = Eigen::VectorXd;  // 9 dofs per node, node-major

// y = [id,0], grad y = [e1,e2] everywhere.
PlateField flat_state(const QuadMesh& mesh);

// Value dofs of y as a 3N vector (the split variable lives there).
Eigen::VectorXd nodal_values(const PlateField& y, int num_nodes);

struct SplitState {
  PlateField y;
  Eigen::VectorXd s;  // nodal 3-vectors, s(z) in K after projection
};

SplitState initial_state(const QuadMesh& mesh);

struct PlateStepStats {
  double functional_before = 0.0;
  double functional_after = 0.0;
  double constraint_residual = 0.0;  // max |B v| over free nodes
  double solve_residual = 0.0;
  double velocity_max = 0.0;         // max |dof(v)|
  double energy_after = 0.0;         // bending energy I[y^{k+1}]
  double stationarity = 0.0;         // ||tau v||_L2 + ||Dh2 tau v||_L2
};

// Assembled operators of one mesh/material pair plus the reduced-system
// machinery reused across time steps.  The linearized isometry constraint is
// eliminated exactly through the per-node kernels, leaving an SPD system
// (values + 3 reduced gradient coordinates per free node).
class PlateOperators {
 public:
  PlateOperators(const QuadMesh& mesh, const Eigen::VectorXd& mu_per_element,
                 const Eigen::VectorXd& alpha_per_element,
                 const std::vector<bool>& clamped_nodes);

  const QuadMesh& mesh() const { return *mesh_; }
  const ElementTable& table() const { return table_; }
  const SparseMat& bending_matrix() const { return K_mu_; }
  const SparseMat& bending_unit() const { return K_unit_; }
  const SparseMat& dkq_mass() const { return M_dkq_; }
  const Eigen::VectorXd& lumped_diagonal() const { return M_lump_; }
  const std::vector<bool>& clamped() const { return clamped_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

  long factorization_count() const { return factorizations_; }
  long pcg_iteration_count() const { return pcg_iterations_; }

  // L2(omega) norm of a DKQ field and of its discrete Hessian.
  double l2_norm(const PlateField& w) const;
  double hessian_norm(const PlateField& w) const;

  // tau (mu Dh2 v, Dh2 w) + tau/eps (v,w)_h = rhs on the constrained space.
  // Returns the velocity on the full dof vector (zero at clamped nodes).
  PlateField solve_step(const PlateField& y, const Eigen::VectorXd& rhs, double tau,
                        double epsilon, PlateStepStats* stats);

 private:
  void prepare(double tau, double epsilon);

  const QuadMesh* mesh_;
  ElementTable table_;
  Eigen::VectorXd mu_, alpha_;
  std::vector<bool> clamped_;
  std::vector<int> free_nodes_;
  std::vector<int> node_to_free_;

  SparseMat K_mu_, K_unit_, M_dkq_;
  Eigen::VectorXd M_lump_;

  // Block-compressed column storage of A = tau K_mu + tau/eps M_lump on the
  // free nodes: per free column j, sorted free row blocks.
  std::vector<std::vector<int>> col_blocks_;
  std::vector<std::vector<Eigen::Matrix<double, 9, 9>>> K_blocks_;
  double prep_tau_ = -1.0, prep_eps_ = -1.0;
  std::vector<std::vector<Eigen::Matrix<double, 9, 9>>> A_blocks_;
  SparseMat A_reduced_;
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
  bool pattern_ready_ = false;
  bool factor_valid_ = false;   // stale factors precondition a CG solve
  int last_pcg_iters_ = 0;
  long factorizations_ = 0;
  long pcg_iterations_ = 0;

  std::vector<Eigen::Matrix<double, 6, 3>> kernels_;  // per free node
  std::vector<Eigen::Matrix<double, 3, 6>> blocks_;
};

// Carries K y across steps (K y^{k+1} = K y^k + tau K v).
struct PlateScratch {
  Eigen::VectorXd Ky;
  bool valid = false;
};

// One step of the fully practical scheme: solve for the admissible velocity,
// update y, project the split variable nodewise.
SplitState plate_step(PlateOperators& ops, const SplitState& state,
                      const TempField& theta_next, double tau, double epsilon,
                      const Obstacle& obstacle, PlateStepStats* stats = nullptr,
                      PlateScratch* scratch = nullptr);

// Discrete bending energy I[y] with the vertex rule on the coupling terms.
double bending_energy(const PlateOperators& ops, const PlateField& y,
                      const TempField& theta);

// Semi-implicit functional J[y; y_ref, s, theta] whose Euler-Lagrange
// equation is the plate step (per-step descent quantity).
double semi_implicit_functional(const PlateOperators& ops, const PlateField& y,
                                const PlateField& y_ref, const Eigen::VectorXd& s,
                                const TempField& theta, double epsilon);

// max over nodes of || G^T G - I ||_F.
double isometry_defect(const QuadMesh& mesh, const PlateField& y);

}  // namespace bilayer
