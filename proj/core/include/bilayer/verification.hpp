#pragma once

#include <string>
#include <vector>

#include "bilayer/simulation.hpp"

namespace bilayer {

// Backward-Euler / Q1 convergence against a closed-form solution on
// (-1,1)^2: spatial orders with tau ~ h^2, temporal order by tau halving on
// the finest mesh.
struct HeatConvergenceReport {
  std::vector<int> refinements;
  std::vector<double> h;
  std::vector<double> error;      // L2 at the final time
  double spatial_order_min = 0.0; // smallest pairwise observed order
  std::vector<double> taus;
  std::vector<double> tau_error;
  double temporal_order = 0.0;
  bool spatial_pass(double required = 1.9) const { return spatial_order_min >= required; }
  bool temporal_pass(double tol = 0.15) const {
    return std::abs(temporal_order - 1.0) <= tol;
  }
};

HeatConvergenceReport run_heat_manufactured(int refine_min = 3, int refine_max = 6);

// Clamped strip under uniform temperature with alpha*theta = kappa*: the
// stationary state is the cylinder of curvature kappa*.  The fitted midline
// curvature checks the whole plate pipeline.
struct CylinderReport {
  double kappa_target = 0.0;
  double kappa_fit = 0.0;
  double rel_error = 1.0;
  int steps = 0;
  double end_time = 0.0;
  bool stationary = false;
  double defect_final = 0.0;
  double energy_final = 0.0;
  double energy_exact = 0.0;  // mu |omega| kappa*^2 / 12
  double tip_height = 0.0;    // max deformed z on the midline
  double max_descent_violation = 0.0;
  double max_constraint_violation = 0.0;
  Diagnostics diag;
};

ScenarioConfig cylinder_scenario(int nx = 64, int ny = 8, double kappa_star = 0.5);
CylinderReport run_cylinder_test(const ScenarioConfig& config);
CylinderReport run_cylinder_test(int nx = 64, int ny = 8, double kappa_star = 0.5);

}  // namespace bilayer
