#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bilayer/plate.hpp"
#include "bilayer/scenario.hpp"
#include "bilayer/snapshot.hpp"

namespace bilayer {

// Mesh, per-element coefficients and solvers assembled from a scenario.
struct SimulationSetup {
  QuadMesh mesh;
  Eigen::VectorXd mu, alpha, diffusivity;  // per element
  Eigen::VectorXd robin_velocity;          // per edge
  std::vector<bool> clamped;
  std::unique_ptr<PlateOperators> plate;
  std::optional<HeatSystem> heat;
  std::unique_ptr<HeatStepper> heat_stepper;
  std::vector<TimeFn> source_rates;
};

SimulationSetup prepare_simulation(const ScenarioConfig& config, bool with_plate = true);

std::vector<bool> resolve_clamped(const QuadMesh& mesh, const std::vector<ClampRule>& rules);

struct RunOptions {
  std::string out_dir;         // empty: nothing written
  bool plate_enabled = true;   // false: heat trajectory only
  bool write_snapshots = true;
  std::function<void(int step, double t, const TempField&, const SplitState&)> observer;
};

struct RunResult {
  QuadMesh mesh;
  SplitState state;
  TempField theta;
  Diagnostics diag;
  int steps = 0;
  double end_time = 0.0;
  bool reached_stationary = false;
  double max_descent_violation = 0.0;   // max over steps of J_after - J_before
  double max_constraint_violation = 0.0;  // max of |Bv|_inf - 1e-10 (1+|v|_inf)
  double max_penetration = 0.0;           // over the whole run
  std::vector<std::string> snapshot_files;
  std::vector<std::string> warnings;
  long factorizations = 0;  // linear solver work counters
  long pcg_iterations = 0;
};

// Algorithm outer loop: heat step then plate step from theta = 0 and the
// flat state, until t_max or stationarity.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

// Stationarity criterion ||y1 - y0||_L2 + ||Dh2 (y1 - y0)||_L2 <= tol.
bool check_stationary(const PlateOperators& ops, const PlateField& y_next,
                      const PlateField& y_prev, double tol);
double stationarity_norm(const PlateOperators& ops, const PlateField& delta);

// Deformed midline cut (nodes on the horizontal center line, sorted by x).
struct MidlineCut {
  std::vector<double> x;          // parametric coordinate
  std::vector<Vec3> deformed;
};
MidlineCut midline_cut(const QuadMesh& mesh, const PlateField& y, double y_level);

struct SweepEntry {
  int j = 0;
  double epsilon = 0.0;
  double tau = 0.0;
  int steps = 0;
  double end_time = 0.0;
  bool stationary = false;
  double tip_height = 0.0;       // deformed y3 at the far end of the midline
  double max_penetration = 0.0;
  double max_descent_violation = 0.0;
  double max_constraint_violation = 0.0;
  double max_abs_functional = 0.0;
  MidlineCut cut;
};

// Penalty study: for j in [j_lo, j_hi], epsilon = 4e-j and tau chosen from
// the tau-epsilon consistency condition; each run goes to stationarity.
std::vector<SweepEntry> run_epsilon_sweep(const ScenarioConfig& base, int j_lo, int j_hi,
                                          const std::string& out_dir = "");

// tau with tau^2 = factor * T^2 mu0 eps / l^4 (mu0 = smallest region mu_bar).
double sweep_tau(const ScenarioConfig& config, double epsilon, double factor = 0.008);

}  // namespace bilayer
