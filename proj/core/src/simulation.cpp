#include "bilayer/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

namespace bilayer {

namespace {

QuadMesh build_scenario_mesh(const MeshRecipe& recipe) {
  QuadMesh mesh = build_grid_mesh(recipe.lo, recipe.hi, recipe.divisions_x,
                                  recipe.divisions_y, recipe.refinements);
  if (!recipe.regions.empty()) mesh = snap_region_mesh(mesh, recipe.regions);
  return mesh;
}

std::vector<std::pair<BoundaryTag, EdgePredicate>> boundary_predicates(
    const std::vector<BoundaryRule>& rules) {
  std::vector<std::pair<BoundaryTag, EdgePredicate>> preds;
  for (const BoundaryRule& r : rules) {
    preds.emplace_back(r.tag, [r](const Vec2& p) {
      return p.x() >= r.lo.x() && p.x() <= r.hi.x() && p.y() >= r.lo.y() &&
             p.y() <= r.hi.y();
    });
  }
  return preds;
}

int element_containing(const QuadMesh& mesh, const Vec2& p) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto c = mesh.element_corners(e);
    const double x0 = std::min({c[0].x(), c[1].x(), c[2].x(), c[3].x()});
    const double x1 = std::max({c[0].x(), c[1].x(), c[2].x(), c[3].x()});
    const double y0 = std::min({c[0].y(), c[1].y(), c[2].y(), c[3].y()});
    const double y1 = std::max({c[0].y(), c[1].y(), c[2].y(), c[3].y()});
    if (p.x() >= x0 - 1e-12 && p.x() <= x1 + 1e-12 && p.y() >= y0 - 1e-12 &&
        p.y() <= y1 + 1e-12)
      return e;
  }
  throw std::invalid_argument("clamp point lies outside the mesh");
}

}  // namespace

std::vector<bool> resolve_clamped(const QuadMesh& mesh, const std::vector<ClampRule>& rules) {
  std::vector<bool> clamped(mesh.num_nodes(), false);
  for (const ClampRule& rule : rules) {
    switch (rule.kind) {
      case ClampRule::Kind::tagged_dirichlet:
        for (int n : mesh.nodes_with_tag(BoundaryTag::dirichlet_clamped)) clamped[n] = true;
        break;
      case ClampRule::Kind::box:
        for (int n = 0; n < mesh.num_nodes(); ++n) {
          const Vec2& p = mesh.nodes[n];
          if (p.x() >= rule.lo.x() && p.x() <= rule.hi.x() && p.y() >= rule.lo.y() &&
              p.y() <= rule.hi.y())
            clamped[n] = true;
        }
        break;
      case ClampRule::Kind::region: {
        const int id = mesh.region_id(rule.region);
        if (id < 0) throw std::invalid_argument("clamp region not found: " + rule.region);
        for (int e = 0; e < mesh.num_elements(); ++e)
          if (mesh.region_tags[e] == id)
            for (int c = 0; c < 4; ++c) clamped[mesh.elements[e][c]] = true;
        break;
      }
      case ClampRule::Kind::element_at: {
        const int e = element_containing(mesh, rule.point);
        for (int c = 0; c < 4; ++c) clamped[mesh.elements[e][c]] = true;
        break;
      }
    }
  }
  return clamped;
}

SimulationSetup prepare_simulation(const ScenarioConfig& config, bool with_plate) {
  config.material.validate();
  if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(config.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

  SimulationSetup setup;
  setup.mesh = build_scenario_mesh(config.mesh);
  setup.mesh = tag_boundary(std::move(setup.mesh), boundary_predicates(config.boundary));

  const QuadMesh& mesh = setup.mesh;
  setup.mu.resize(mesh.num_elements());
  setup.alpha.resize(mesh.num_elements());
  setup.diffusivity.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const std::string& name = mesh.region_names[mesh.region_tags[e]];
    auto it = config.material.regions.find(name);
    if (it == config.material.regions.end())
      throw std::invalid_argument("missing material coefficients for region '" + name + "'");
    setup.mu(e) = it->second.mu_bar;
    setup.alpha(e) = it->second.alpha_bar;
    setup.diffusivity(e) = it->second.diffusivity;
  }
  setup.robin_velocity =
      Eigen::VectorXd::Constant(mesh.num_edges(), config.material.robin_velocity);

  setup.clamped = resolve_clamped(mesh, config.clamps);
  if (with_plate)
    setup.plate = std::make_unique<PlateOperators>(mesh, setup.mu, setup.alpha, setup.clamped);

  if (config.heat_mode == HeatMode::solve) {
    std::vector<HeatSource> sources;
    for (const SourceSpec& s : config.sources) {
      HeatSource hs;
      hs.shape = s.shape == SourceSpec::Shape::circle ? HeatSource::Shape::circle
                                                      : HeatSource::Shape::everywhere;
      hs.center = s.center;
      hs.radius = s.radius;
      hs.rate = s.rate;
      sources.push_back(hs);
      setup.source_rates.push_back(s.rate);
    }
    setup.heat =
        assemble_heat_system(mesh, setup.diffusivity, setup.robin_velocity, sources);
    setup.heat_stepper = std::make_unique<HeatStepper>(*setup.heat, config.tau);
  }
  return setup;
}

double stationarity_norm(const PlateOperators& ops, const PlateField& delta) {
  return ops.l2_norm(delta) + ops.hessian_norm(delta);
}

bool check_stationary(const PlateOperators& ops, const PlateField& y_next,
                      const PlateField& y_prev, double tol) {
  return stationarity_norm(ops, y_next - y_prev) <= tol;
}

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
  SimulationSetup setup = prepare_simulation(config, options.plate_enabled);
  const QuadMesh& mesh = setup.mesh;
  RunResult result;
  result.warnings = mesh.warnings;

  // tau-epsilon consistency: warn when tau^2 exceeds 1% of T^2 mu0 eps / l^4
  {
    double mu0 = setup.mu.minCoeff();
    const double bound = config.char_time * config.char_time * mu0 * config.epsilon /
                         std::pow(config.char_length, 4);
    if (config.tau * config.tau > 0.01 * bound)
      result.warnings.push_back(
          "tau^2 exceeds 0.01 T^2 mu0 eps / l^4; obstacle dynamics may be distorted");
  }

  const int total_steps = static_cast<int>(std::ceil(config.t_max / config.tau - 1e-9));
  const int cadence = config.snapshot_every > 0
                          ? config.snapshot_every
                          : std::max(1, (total_steps + 49) / 50);

  SplitState state = initial_state(mesh);
  if (max_penetration(state.y, mesh.num_nodes(), config.obstacle) > 0.0)
    throw std::invalid_argument("undeformed plate intersects the obstacle");
  TempField theta = TempField::Zero(mesh.num_nodes());

  const bool want_files = !options.out_dir.empty();
  if (want_files) std::filesystem::create_directories(options.out_dir);

  std::vector<double> pending_times = config.snapshot_times;
  std::sort(pending_times.begin(), pending_times.end());
  size_t next_time = 0;

  auto maybe_snapshot = [&](int step, double t_prev, double t_now) {
    if (!want_files || !options.write_snapshots) return;
    bool due = false;
    if (!pending_times.empty()) {
      while (next_time < pending_times.size() && pending_times[next_time] <= t_now + 1e-12) {
        if (pending_times[next_time] > t_prev - 1e-12) due = true;
        ++next_time;
      }
    } else {
      due = step == 0 || step == total_steps || step % cadence == 0;
    }
    if (due)
      result.snapshot_files.push_back(
          write_snapshot(mesh, state, theta, step, options.out_dir));
  };

  maybe_snapshot(0, -1.0, 0.0);
  if (options.observer) options.observer(0, 0.0, theta, state);

  bool max_principle_flagged = false;
  PlateScratch scratch;
  double t = 0.0;
  int k = 0;
  for (; k < total_steps; ++k) {
    const double t_next = (k + 1) * config.tau;
    if (config.heat_mode == HeatMode::solve) {
      ThermalData data;
      data.theta_dirichlet = config.theta_dirichlet(t_next);
      data.theta_ext = config.theta_ext(t_next);
      for (const TimeFn& fn : setup.source_rates) data.source_rates.push_back(fn(t_next));
      theta = setup.heat_stepper->step(theta, data);
    } else {
      theta = TempField::Constant(mesh.num_nodes(), config.prescribed_theta(t_next));
    }

    DiagnosticsRow row;
    row.time = t_next;
    row.theta_min = theta.minCoeff();
    row.theta_max = theta.maxCoeff();
    if (row.theta_min < -1e-10 && !max_principle_flagged) {
      result.warnings.push_back("discrete maximum principle violated (theta_min " +
                                std::to_string(row.theta_min) + " at t " +
                                std::to_string(t_next) + ")");
      max_principle_flagged = true;
    }

    if (options.plate_enabled) {
      PlateStepStats stats;
      SplitState next = plate_step(*setup.plate, state, theta, config.tau, config.epsilon,
                                   config.obstacle, &stats, &scratch);
      // subiteration variant of step (2): refresh the split variable until
      // the projection is self-consistent
      if (config.subiterate) {
        for (int it = 0; it < 50; ++it) {
          SplitState trial = state;
          trial.s = next.s;
          scratch.valid = false;
          SplitState refreshed = plate_step(*setup.plate, trial, theta, config.tau,
                                            config.epsilon, config.obstacle, &stats);
          if ((refreshed.s - next.s).cwiseAbs().maxCoeff() <
              1e-12 * (1.0 + next.s.cwiseAbs().maxCoeff())) {
            next = refreshed;
            break;
          }
          next = refreshed;
        }
      }
      const double viol =
          stats.constraint_residual - 1e-10 * (1.0 + stats.velocity_max);
      result.max_constraint_violation = std::max(result.max_constraint_violation, viol);
      result.max_descent_violation = std::max(
          result.max_descent_violation, stats.functional_after - stats.functional_before);

      row.functional = stats.functional_after;
      row.stationarity = stats.stationarity;
      state = std::move(next);
      row.energy = stats.energy_after;
      row.defect = isometry_defect(mesh, state.y);
      row.penetration = max_penetration(state.y, mesh.num_nodes(), config.obstacle);
      result.max_penetration = std::max(result.max_penetration, row.penetration);
    }

    result.diag.rows.push_back(row);
    t = t_next;
    maybe_snapshot(k + 1, t - config.tau, t);
    if (options.observer) options.observer(k + 1, t, theta, state);

    if (options.plate_enabled && config.stop_at_stationary &&
        row.stationarity <= config.stationary_tol) {
      result.reached_stationary = true;
      ++k;
      break;
    }
  }

  if (setup.plate) {
    result.factorizations = setup.plate->factorization_count();
    result.pcg_iterations = setup.plate->pcg_iteration_count();
  }
  result.mesh = std::move(setup.mesh);
  result.state = std::move(state);
  result.theta = std::move(theta);
  result.steps = k;
  result.end_time = t;
  if (want_files) write_diagnostics(result.diag, options.out_dir + "/diagnostics.csv");
  return result;
}

MidlineCut midline_cut(const QuadMesh& mesh, const PlateField& y, double y_level) {
  std::vector<std::pair<double, int>> line;
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (std::abs(mesh.nodes[n].y() - y_level) < 1e-9)
      line.emplace_back(mesh.nodes[n].x(), n);
  std::sort(line.begin(), line.end());
  MidlineCut cut;
  for (auto [x, n] : line) {
    cut.x.push_back(x);
    cut.deformed.emplace_back(y(dof_value(n, 0)), y(dof_value(n, 1)), y(dof_value(n, 2)));
  }
  return cut;
}

double sweep_tau(const ScenarioConfig& config, double epsilon, double factor) {
  double mu0 = std::numeric_limits<double>::max();
  for (const auto& [name, m] : config.material.regions) mu0 = std::min(mu0, m.mu_bar);
  const double bound = config.char_time * config.char_time * mu0 * epsilon /
                       std::pow(config.char_length, 4);
  return std::sqrt(factor * bound);
}

std::vector<SweepEntry> run_epsilon_sweep(const ScenarioConfig& base, int j_lo, int j_hi,
                                          const std::string& out_dir) {
  if (j_lo > j_hi) throw std::invalid_argument("empty j range");
  std::vector<SweepEntry> entries;
  for (int j = j_lo; j <= j_hi; ++j) {
    ScenarioConfig c = base;
    c.epsilon = 4.0 * std::pow(10.0, -j);
    c.tau = sweep_tau(base, c.epsilon);
    c.stop_at_stationary = true;

    RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir + "/j" + std::to_string(j);
    opts.write_snapshots = false;
    RunResult r = run(c, opts);

    SweepEntry e;
    e.j = j;
    e.epsilon = c.epsilon;
    e.tau = c.tau;
    e.steps = r.steps;
    e.end_time = r.end_time;
    e.stationary = r.reached_stationary;
    e.max_penetration = r.max_penetration;
    e.max_descent_violation = r.max_descent_violation;
    e.max_constraint_violation = r.max_constraint_violation;
    for (const auto& row : r.diag.rows)
      e.max_abs_functional = std::max(e.max_abs_functional, std::abs(row.functional));
    e.cut = midline_cut(r.mesh, r.state.y, 0.5 * (c.mesh.lo.y() + c.mesh.hi.y()));
    e.tip_height = e.cut.deformed.empty() ? 0.0 : e.cut.deformed.back().z();
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::FILE* f =
          std::fopen((out_dir + "/cut_j" + std::to_string(j) + ".csv").c_str(), "w");
      if (!f) throw std::runtime_error("cannot write cut file");
      std::fprintf(f, "x,y1,y2,y3\n");
      for (size_t i = 0; i < e.cut.x.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", e.cut.x[i], e.cut.deformed[i].x(),
                     e.cut.deformed[i].y(), e.cut.deformed[i].z());
      std::fclose(f);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace bilayer
