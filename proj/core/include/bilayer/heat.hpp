#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <vector>

#include "bilayer/mesh.hpp"
#include "bilayer/timefn.hpp"

namespace bilayer {

using SparseMat = Eigen::SparseMatrix<double>;
using TempField = Eigen::VectorXd;  // one value per node, degC

// Volumetric source, sigma-normalized rate in degC/s, applied on elements
// whose centroid lies in the shape.
struct HeatSource {
  enum class Shape { circle, region, everywhere };
  Shape shape = Shape::everywhere;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  int region_id = -1;
  TimeFn rate;
};

// Backward-Euler Q1 system for the sigma-normalized diffusion equation:
// coefficients are diffusivity kappa/sigma (mm^2/s) per element and transfer
// velocity eta/sigma (mm/s) per robin edge.
struct HeatSystem {
  SparseMat M, K, R;
  Eigen::VectorXd robin_load_unit;            // load for theta_ext = 1
  std::vector<Eigen::VectorXd> source_loads;  // unit-rate load per source
  std::vector<int> dirichlet_nodes;           // sorted
  int num_nodes = 0;
};

HeatSystem assemble_heat_system(const QuadMesh& mesh,
                                const Eigen::VectorXd& diffusivity_per_element,
                                const Eigen::VectorXd& robin_velocity_per_edge,
                                const std::vector<HeatSource>& sources = {});

// Data of one implicit step, evaluated at t^{k+1}.
struct ThermalData {
  double theta_dirichlet = 0.0;
  double theta_ext = 0.0;
  std::vector<double> source_rates;
};

// Caches the factorization of M/tau + K + R on the free nodes; Dirichlet
// values are enforced exactly by lifting.
class HeatStepper {
 public:
  HeatStepper(const HeatSystem& system, double tau);

  TempField step(const TempField& prev, const ThermalData& data) const;
  // General variant for the verification harness: arbitrary extra load and
  // per-node Dirichlet trace values.
  TempField step_general(const TempField& prev, const Eigen::VectorXd& extra_load,
                         const Eigen::VectorXd& dirichlet_values) const;

 private:
  const HeatSystem* sys_;
  double tau_;
  std::vector<int> free_;        // free node ids
  std::vector<int> node_to_free_;
  SparseMat A_ff_, A_fd_;
  SparseMat M_over_tau_;
  Eigen::SimplicialLDLT<SparseMat> solver_;
};

TempField heat_step(const HeatSystem& system, const TempField& prev, double tau,
                    const ThermalData& data);

// Q1 load vector for a spatial density (2x2 Gauss).
Eigen::VectorXd assemble_q1_load(const QuadMesh& mesh,
                                 const std::function<double(const Vec2&)>& density);

// L2(omega) error of a Q1 field against a closed-form solution (3x3 Gauss).
double q1_l2_error(const QuadMesh& mesh, const TempField& theta,
                   const std::function<double(const Vec2&)>& exact);

}  // namespace bilayer
