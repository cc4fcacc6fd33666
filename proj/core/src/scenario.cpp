#include "bilayer/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace bilayer {

namespace {
const double kPi = 3.14159265358979323846;

ScenarioConfig switch_scenario() {
  ScenarioConfig c;
  c.name = "switch";
  const double a = -1.0 + kPi / 40.0;
  c.mesh.lo = {-1, -1};
  c.mesh.hi = {1, 1};
  c.mesh.refinements = 5;  // experiment used 6
  c.mesh.regions.regions.push_back({"hinge", {-1, -1}, {a, 1}});
  c.mesh.regions.regions.push_back({"plate", {a, -1}, {1, 1}});
  c.material.regions["hinge"] = {2000.0, 0.1, 0.1};
  c.material.regions["plate"] = {2000.0, 0.0, 0.1};
  c.material.robin_velocity = 0.0;  // clamped side heated, the rest insulated
  c.boundary.push_back(
      {BoundaryTag::dirichlet_clamped, {-1.000001, -1.000001}, {-0.999999, 1.000001}});
  c.theta_dirichlet = TimeFn::ramp_fn(100.0, 5.0);
  c.clamps.push_back(ClampRule::tagged_dirichlet());
  c.obstacle = Obstacle::halfspace(0.5);
  c.tau = 3.0e-3;
  c.epsilon = 4.0e-6;
  c.t_max = 400.0;
  c.stop_at_stationary = true;
  c.stationary_tol = 1e-5;
  c.char_time = 10.0;
  c.char_length = 2.0;
  return c;
}

ScenarioConfig dogear_scenario(double diffusivity) {
  ScenarioConfig c;
  c.name = diffusivity < 0.5 ? "dogear_a" : "dogear_b";
  c.mesh.lo = {-1, -1};
  c.mesh.hi = {1, 1};
  c.mesh.refinements = 5;  // experiment used 6
  c.material.regions["default"] = {2000.0, 0.1, diffusivity};
  c.material.robin_velocity = 2.0;
  // clamped side insulated; robin heating on the remaining boundary
  c.boundary.push_back(
      {BoundaryTag::insulated_free, {-1.000001, -1.000001}, {-0.999999, 1.000001}});
  c.boundary.push_back({BoundaryTag::robin, {-1.000001, -1.000001}, {1.000001, 1.000001}});
  c.theta_ext = TimeFn::constant_fn(50.0);
  c.clamps.push_back(ClampRule::box({-1.000001, -1.000001}, {-0.999999, 1.000001}));
  c.tau = 5.0e-3;
  c.epsilon = 4.0e-6;  // no obstacle; penalty acts as mild damping only
  // snapshots at t = {0, 1, 2.5, 16} x kappa/sigma as published
  const double scale = diffusivity / 1.0;
  c.t_max = 16.0 * scale;
  c.snapshot_times = {0.0, 1.0 * scale, 2.5 * scale, 16.0 * scale};
  c.char_time = 40.0;
  c.char_length = 2.0;
  return c;
}

ScenarioConfig box_scenario() {
  ScenarioConfig c;
  c.name = "box";
  const double w = kPi / 48.0;
  const double s = 1.0 + w;
  c.mesh.lo = {0, 0};
  c.mesh.hi = {2 * s + 1, 2 * s + 1};
  c.mesh.refinements = 3;
  auto add = [&c](const std::string& name, double x0, double y0, double x1, double y1) {
    c.mesh.regions.regions.push_back({name, {x0, y0}, {x1, y1}});
  };
  add("center", s, s, s + 1, s + 1);
  add("west", 0, s, 1, s + 1);
  add("east", 2 * s, s, 2 * s + 1, s + 1);
  add("south", s, 0, s + 1, 1);
  add("north", s, 2 * s, s + 1, 2 * s + 1);
  add("lid", 2 * s, 2 * s, 2 * s + 1, 2 * s + 1);
  add("hinge_w", 1, s, s, s + 1);
  add("hinge_e", s + 1, s, 2 * s, s + 1);
  add("hinge_s", s, 1, s + 1, s);
  add("hinge_n", s, s + 1, s + 1, 2 * s);
  add("hinge_lid", 2 * s, s + 1, 2 * s + 1, 2 * s);
  const RegionMaterial plate{20.0 * 2000.0, 0.0, 10.0};
  const RegionMaterial hinge{2000.0, 0.1, 10.0};
  for (const char* r : {"center", "west", "east", "south", "north", "lid"})
    c.material.regions[r] = plate;
  for (const char* r : {"hinge_w", "hinge_e", "hinge_s", "hinge_n", "hinge_lid"})
    c.material.regions[r] = hinge;
  c.material.robin_velocity = 0.0;
  SourceSpec src;
  src.shape = SourceSpec::Shape::circle;
  src.center = {s + 0.5, s + 0.5};
  src.radius = 0.25;
  src.rate = TimeFn::pulse_fn(75.0, 0.0, 19.0);
  c.sources.push_back(src);
  c.clamps.push_back(ClampRule::region_named("center"));
  c.tau = 0.5;
  c.epsilon = 5.0e-3;
  c.t_max = 30.0;
  c.char_time = 30.0;
  c.char_length = 2 * s + 1;
  return c;
}

ScenarioConfig airfoil_scenario() {
  // plate/hinge sizes are an interpretation of the sketch: three unit plates
  // in a row joined by two hinges folding in opposite directions
  ScenarioConfig c;
  c.name = "airfoil";
  const double w = kPi / 48.0;
  const double s = 1.0 + w;
  c.mesh.lo = {0, 0};
  c.mesh.hi = {2 * s + 1, 1};
  c.mesh.refinements = 3;
  c.mesh.regions.regions.push_back({"left", {0, 0}, {1, 1}});
  c.mesh.regions.regions.push_back({"hinge_up", {1, 0}, {s, 1}});
  c.mesh.regions.regions.push_back({"mid", {s, 0}, {s + 1, 1}});
  c.mesh.regions.regions.push_back({"hinge_down", {s + 1, 0}, {2 * s, 1}});
  c.mesh.regions.regions.push_back({"right", {2 * s, 0}, {2 * s + 1, 1}});
  const RegionMaterial plate{20.0 * 2000.0, 0.0, 0.1};
  c.material.regions["left"] = plate;
  c.material.regions["mid"] = plate;
  c.material.regions["right"] = plate;
  c.material.regions["hinge_up"] = {2000.0, 0.3, 0.1};
  c.material.regions["hinge_down"] = {2000.0, -0.3, 0.1};
  c.material.robin_velocity = 0.0;
  const double eps = 1e-6;
  // heated where the hinges meet the boundary
  c.boundary.push_back({BoundaryTag::dirichlet_clamped, {1 - eps, -eps}, {s + eps, eps}});
  c.boundary.push_back({BoundaryTag::dirichlet_clamped, {1 - eps, 1 - eps}, {s + eps, 1 + eps}});
  c.boundary.push_back(
      {BoundaryTag::dirichlet_clamped, {s + 1 - eps, -eps}, {2 * s + eps, eps}});
  c.boundary.push_back(
      {BoundaryTag::dirichlet_clamped, {s + 1 - eps, 1 - eps}, {2 * s + eps, 1 + eps}});
  c.theta_dirichlet = TimeFn::constant_fn(60.0);
  c.clamps.push_back(ClampRule::region_named("mid"));
  c.tau = 0.5;
  c.epsilon = 5.0e-3;
  c.t_max = 500.0;
  c.char_time = 100.0;
  c.char_length = 2 * s + 1;
  return c;
}

ScenarioConfig capsule_scenario() {
  ScenarioConfig c;
  c.name = "capsule";
  c.mesh.lo = {-1, -1};
  c.mesh.hi = {2, 2};
  c.mesh.refinements = 4;  // experiment used 6
  c.mesh.regions.regions.push_back({"center", {0, 0}, {1, 1}});
  c.mesh.regions.regions.push_back({"north", {0, 1}, {1, 2}});
  c.mesh.regions.regions.push_back({"south", {0, -1}, {1, 0}});
  c.mesh.regions.regions.push_back({"west", {-1, 0}, {0, 1}});
  c.mesh.regions.regions.push_back({"east", {1, 0}, {2, 1}});
  const RegionMaterial bilayer{2000.0, 0.1, 0.1};
  for (const char* r : {"center", "north", "south", "west", "east"})
    c.material.regions[r] = bilayer;
  c.material.robin_velocity = 2.0;
  c.boundary.push_back({BoundaryTag::robin, {-1.1, -1.1}, {2.1, 2.1}});
  c.theta_ext = TimeFn::constant_fn(100.0);
  c.clamps.push_back(ClampRule::element_at({0.5, 0.5}));
  c.obstacle = Obstacle::sphere_union({{0.28, 0.28, 0.25},
                                       {0.72, 0.28, 0.25},
                                       {0.28, 0.72, 0.25},
                                       {0.72, 0.72, 0.25},
                                       {0.5, 0.5, 0.5}},
                                      0.24);
  c.tau = 2.5e-4;
  c.epsilon = 5.0e-8;
  c.t_max = 1.0;
  c.char_time = 1.0;
  c.char_length = 1.0;
  return c;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && mesh == o.mesh && material == o.material &&
         boundary == o.boundary && theta_dirichlet == o.theta_dirichlet &&
         theta_ext == o.theta_ext && sources == o.sources && heat_mode == o.heat_mode &&
         prescribed_theta == o.prescribed_theta && obstacle == o.obstacle &&
         clamps == o.clamps && tau == o.tau && epsilon == o.epsilon && t_max == o.t_max &&
         stationary_tol == o.stationary_tol && stop_at_stationary == o.stop_at_stationary &&
         subiterate == o.subiterate && snapshot_every == o.snapshot_every &&
         snapshot_times == o.snapshot_times && char_time == o.char_time &&
         char_length == o.char_length;
}

bool MeshRecipe::operator==(const MeshRecipe& o) const {
  if (!(lo == o.lo && hi == o.hi && divisions_x == o.divisions_x &&
        divisions_y == o.divisions_y && refinements == o.refinements))
    return false;
  if (regions.regions.size() != o.regions.regions.size()) return false;
  for (size_t i = 0; i < regions.regions.size(); ++i) {
    const Region& a = regions.regions[i];
    const Region& b = o.regions.regions[i];
    if (!(a.name == b.name && a.lo == b.lo && a.hi == b.hi)) return false;
  }
  return true;
}

std::vector<std::string> builtin_scenario_names() {
  return {"switch", "dogear_a", "dogear_b", "box", "airfoil", "capsule"};
}

ScenarioConfig builtin_scenario(const std::string& name, int refine_override) {
  ScenarioConfig c;
  if (name == "switch") c = switch_scenario();
  else if (name == "dogear_a") c = dogear_scenario(0.1);
  else if (name == "dogear_b") c = dogear_scenario(1.0);
  else if (name == "box") c = box_scenario();
  else if (name == "airfoil") c = airfoil_scenario();
  else if (name == "capsule") c = capsule_scenario();
  else throw std::invalid_argument("unknown scenario: " + name);
  if (refine_override >= 0) c.mesh.refinements = refine_override;
  return c;
}

}  // namespace bilayer
