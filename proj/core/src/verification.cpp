#include "bilayer/verification.hpp"

#include <cmath>

namespace bilayer {

namespace {
const double kPi = 3.14159265358979323846;

double run_manufactured_once(int refine, double tau, double t_end) {
  auto exact = [](const Vec2& x, double t) {
    return std::exp(-t) * std::cos(kPi * x.x() / 2) * std::cos(kPi * x.y() / 2);
  };
  auto source = [&](const Vec2& x, double t) {
    return (kPi * kPi / 2.0 - 1.0) * exact(x, t);
  };
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, refine);
  m = tag_boundary(std::move(m),
                   {{BoundaryTag::dirichlet_clamped, [](const Vec2&) { return true; }}});
  HeatSystem sys = assemble_heat_system(m, Eigen::VectorXd::Ones(m.num_elements()),
                                        Eigen::VectorXd::Zero(m.num_edges()));
  const int steps = static_cast<int>(std::round(t_end / tau));
  HeatStepper stepper(sys, t_end / steps);
  TempField t = TempField::Zero(m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) t(n) = exact(m.nodes[n], 0.0);
  for (int k = 1; k <= steps; ++k) {
    const double tn = k * (t_end / steps);
    Eigen::VectorXd load = assemble_q1_load(m, [&](const Vec2& x) { return source(x, tn); });
    t = stepper.step_general(t, load, Eigen::VectorXd::Zero(m.num_nodes()));
  }
  return q1_l2_error(m, t, [&](const Vec2& x) { return exact(x, t_end); });
}

}  // namespace

HeatConvergenceReport run_heat_manufactured(int refine_min, int refine_max) {
  HeatConvergenceReport rep;
  const double t_end = 0.5;
  for (int r = refine_min; r <= refine_max; ++r) {
    const double h = 2.0 / (1 << r);
    rep.refinements.push_back(r);
    rep.h.push_back(h);
    rep.error.push_back(run_manufactured_once(r, h * h / 8.0, t_end));
  }
  rep.spatial_order_min = 1e30;
  for (size_t i = 0; i + 1 < rep.error.size(); ++i)
    rep.spatial_order_min =
        std::min(rep.spatial_order_min, std::log2(rep.error[i] / rep.error[i + 1]));

  // temporal: fixed fine mesh, tau halving in a regime dominated by the
  // time error (space error is ~1e-3 of these values)
  const double t_end_time = 0.8;
  for (double tau : {0.2, 0.1, 0.05}) {
    rep.taus.push_back(tau);
    rep.tau_error.push_back(run_manufactured_once(refine_max, tau, t_end_time));
  }
  double order = 0.0;
  for (size_t i = 0; i + 1 < rep.tau_error.size(); ++i)
    order += std::log2(rep.tau_error[i] / rep.tau_error[i + 1]);
  rep.temporal_order = order / (rep.tau_error.size() - 1);
  return rep;
}

ScenarioConfig cylinder_scenario(int nx, int ny, double kappa_star) {
  ScenarioConfig c;
  c.name = "cylinder";
  const double length = 4.0, width = 0.5;
  c.mesh.lo = {0, 0};
  c.mesh.hi = {length, width};
  c.mesh.divisions_x = nx / 8;
  c.mesh.divisions_y = std::max(1, ny / 8);
  c.mesh.refinements = 3;  // 8x multiplication of the base grid
  c.material.regions["default"] = {2000.0, 0.1, 0.1};
  c.clamps.push_back(ClampRule::box({-1e-9, -1e-9}, {1e-9, width + 1e-9}));
  c.heat_mode = HeatMode::prescribed;
  c.prescribed_theta = TimeFn::ramp_fn(kappa_star / 0.1, 1.0);
  c.tau = 0.01;
  c.epsilon = 2.0e-4;
  c.t_max = 400.0;
  c.stop_at_stationary = true;
  c.stationary_tol = 1e-5;
  c.char_time = 5.0;
  c.char_length = length;
  return c;
}

CylinderReport run_cylinder_test(const ScenarioConfig& config) {
  CylinderReport rep;
  rep.kappa_target = config.prescribed_theta.value * 0.1;

  RunOptions opts;
  opts.write_snapshots = false;
  RunResult r = run(config, opts);

  rep.steps = r.steps;
  rep.end_time = r.end_time;
  rep.stationary = r.reached_stationary;
  rep.max_descent_violation = r.max_descent_violation;
  rep.max_constraint_violation = r.max_constraint_violation;
  rep.diag = std::move(r.diag);
  rep.defect_final = isometry_defect(r.mesh, r.state.y);

  // fit the curvature as the slope of the midline tangent angle
  const double mid = 0.5 * (config.mesh.lo.y() + config.mesh.hi.y());
  double sxx = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
  std::vector<std::pair<double, double>> samples;
  for (int n = 0; n < r.mesh.num_nodes(); ++n) {
    if (std::abs(r.mesh.nodes[n].y() - mid) > 1e-9) continue;
    const double angle =
        std::atan2(r.state.y(dof_grad(n, 0, 2)), r.state.y(dof_grad(n, 0, 0)));
    samples.emplace_back(r.mesh.nodes[n].x(), angle);
    rep.tip_height = std::max(rep.tip_height, r.state.y(dof_value(n, 2)));
  }
  for (auto [x, a] : samples) {
    mx += x;
    my += a;
  }
  mx /= samples.size();
  my /= samples.size();
  for (auto [x, a] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (a - my);
  }
  rep.kappa_fit = sxy / sxx;
  rep.rel_error = std::abs(rep.kappa_fit - rep.kappa_target) / rep.kappa_target;

  const double area =
      (config.mesh.hi.x() - config.mesh.lo.x()) * (config.mesh.hi.y() - config.mesh.lo.y());
  rep.energy_exact = 2000.0 * area * rep.kappa_target * rep.kappa_target / 12.0;
  rep.energy_final = rep.diag.rows.empty() ? 0.0 : rep.diag.rows.back().energy;
  return rep;
}

CylinderReport run_cylinder_test(int nx, int ny, double kappa_star) {
  return run_cylinder_test(cylinder_scenario(nx, ny, kappa_star));
}

}  // namespace bilayer
