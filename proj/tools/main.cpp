#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "bilayer/config_io.hpp"
#include "bilayer/simulation.hpp"
#include "bilayer/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct CommonArgs {
  std::string scenario;
  std::string config_path;
  int refine = -1;
  double tau = -1.0;
  double epsilon = -1.0;
  double tmax = -1.0;
};

bilayer::ScenarioConfig load_config(const CommonArgs& args) {
  bilayer::ScenarioConfig config;
  if (!args.config_path.empty()) {
    bilayer::ConfigParseResult r = bilayer::parse_config_file(args.config_path);
    if (!r.ok()) {
      for (const std::string& e : r.errors) std::cerr << "config error: " << e << "\n";
      throw std::invalid_argument("invalid configuration file");
    }
    config = *r.config;
  } else if (!args.scenario.empty()) {
    config = bilayer::builtin_scenario(args.scenario);
  } else {
    throw std::invalid_argument("one of --scenario or --config is required");
  }
  if (args.refine >= 0) config.mesh.refinements = args.refine;
  if (args.tau > 0) config.tau = args.tau;
  if (args.epsilon > 0) config.epsilon = args.epsilon;
  if (args.tmax > 0) config.t_max = args.tmax;
  return config;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_overrides = true) {
  cmd->add_option("--scenario", args.scenario,
                  "builtin scenario: switch, dogear_a, dogear_b, box, airfoil, capsule");
  cmd->add_option("--config", args.config_path, "path to a scenario configuration file");
  cmd->add_option("--refine", args.refine, "override mesh refinements");
  if (with_overrides) {
    cmd->add_option("--tau", args.tau, "override time step [s]");
    cmd->add_option("--epsilon", args.epsilon, "override penalty parameter [mm^4/MPa]");
    cmd->add_option("--tmax", args.tmax, "override final time [s]");
  }
}

int cmd_run(const CommonArgs& args, const std::string& out_dir) {
  bilayer::ScenarioConfig config = load_config(args);
  bilayer::RunOptions opts;
  opts.out_dir = out_dir.empty() ? "out/" + config.name : out_dir;
  bilayer::RunResult r = bilayer::run(config, opts);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("scenario %s: %d steps to t = %g s%s\n", config.name.c_str(), r.steps,
              r.end_time, r.reached_stationary ? " (stationary)" : "");
  if (!r.diag.rows.empty()) {
    const auto& last = r.diag.rows.back();
    std::printf("  energy %.6g MPa mm^2, defect %.3g, penetration %.3g mm, theta "
                "[%.3g, %.3g] C\n",
                last.energy, last.defect, last.penetration, last.theta_min, last.theta_max);
  }
  std::printf("  %zu snapshots and diagnostics.csv in %s\n", r.snapshot_files.size(),
              opts.out_dir.c_str());
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& out_dir, const std::string& jrange) {
  int j_lo = 0, j_hi = 0;
  if (std::sscanf(jrange.c_str(), "%d..%d", &j_lo, &j_hi) != 2 || j_lo > j_hi)
    throw std::invalid_argument("--j-range expects 'lo..hi'");
  bilayer::ScenarioConfig config = load_config(args);
  const std::string dir = out_dir.empty() ? "out/sweep_" + config.name : out_dir;
  std::vector<bilayer::SweepEntry> entries =
      bilayer::run_epsilon_sweep(config, j_lo, j_hi, dir);

  std::printf("%3s %12s %12s %9s %12s %14s %16s\n", "j", "epsilon", "tau", "steps",
              "end_time", "tip_height", "max_penetration");
  std::ofstream summary(dir + "/sweep_summary.csv");
  summary << "j,epsilon,tau,steps,end_time,stationary,tip_height,max_penetration\n";
  for (const auto& e : entries) {
    std::printf("%3d %12.4g %12.4g %9d %12.5g %14.8g %16.6g\n", e.j, e.epsilon, e.tau,
                e.steps, e.end_time, e.tip_height, e.max_penetration);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g,%d,%.17g,%.17g\n", e.j,
                  e.epsilon, e.tau, e.steps, e.end_time, e.stationary ? 1 : 0,
                  e.tip_height, e.max_penetration);
    summary << buf;
  }
  std::printf("cut files and sweep_summary.csv in %s\n", dir.c_str());
  return kExitOk;
}

int cmd_verify() {
  std::printf("heat solver, manufactured solution on (-1,1)^2:\n");
  bilayer::HeatConvergenceReport heat = bilayer::run_heat_manufactured(3, 6);
  for (size_t i = 0; i < heat.h.size(); ++i)
    std::printf("  refine %d  h %.5g  L2 error %.6e\n", heat.refinements[i], heat.h[i],
                heat.error[i]);
  std::printf("  observed spatial order >= %.3f (required 1.9)\n", heat.spatial_order_min);
  for (size_t i = 0; i < heat.taus.size(); ++i)
    std::printf("  tau %.4g  L2 error %.6e\n", heat.taus[i], heat.tau_error[i]);
  std::printf("  observed temporal order %.3f (required 1 +- 0.15)\n", heat.temporal_order);

  std::printf("plate pipeline, cylinder curvature on a 64x8 clamped strip:\n");
  bilayer::CylinderReport cyl = bilayer::run_cylinder_test();
  std::printf("  kappa fit %.6g vs target %.6g  (rel error %.3g, required <= 0.05)\n",
              cyl.kappa_fit, cyl.kappa_target, cyl.rel_error);
  std::printf("  %d steps to t = %g s, stationary %s, defect %.3g\n", cyl.steps,
              cyl.end_time, cyl.stationary ? "yes" : "no", cyl.defect_final);

  const bool pass = heat.spatial_pass() && heat.temporal_pass() && cyl.rel_error <= 0.05 &&
                    cyl.stationary;
  std::printf("verify: %s\n", pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitSolver;
}

int cmd_dump_mesh(const CommonArgs& args, const std::string& out_path) {
  bilayer::ScenarioConfig config = load_config(args);
  bilayer::SimulationSetup setup = bilayer::prepare_simulation(config, false);
  if (out_path.empty()) {
    bilayer::dump_mesh(setup.mesh, std::cout);
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open " + out_path);
    bilayer::dump_mesh(setup.mesh, f);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite element simulation of thermally actuated bilayer plates"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, dump_args;
  std::string run_out, sweep_out, sweep_jrange = "4..9", dump_out;

  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd, run_args);
  run_cmd->add_option("--out", run_out, "output directory");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep-epsilon", "penalty study: stationary cuts per epsilon");
  add_common(sweep_cmd, sweep_args, false);
  sweep_cmd->add_option("--j-range", sweep_jrange, "epsilon = 4e-j for j in lo..hi");
  sweep_cmd->add_option("--out", sweep_out, "output directory");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "manufactured-solution and cylinder checks");
  (void)verify_cmd;

  CLI::App* dump_cmd = app.add_subcommand("dump-mesh", "write the mesh as plain text");
  add_common(dump_cmd, dump_args, false);
  dump_cmd->add_option("--out", dump_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_args, run_out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, sweep_out, sweep_jrange);
    if (verify_cmd->parsed()) return cmd_verify();
    if (dump_cmd->parsed()) return cmd_dump_mesh(dump_args, dump_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
