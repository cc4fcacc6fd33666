#pragma once

#include <string>
#include <vector>

#include "bilayer/heat.hpp"
#include "bilayer/material.hpp"
#include "bilayer/mesh.hpp"
#include "bilayer/obstacle.hpp"
#include "bilayer/timefn.hpp"

namespace bilayer {

// Boundary edges whose midpoint falls in the box get the tag; listed rules
// are applied first-match, everything else stays insulated_free.
struct BoundaryRule {
  BoundaryTag tag = BoundaryTag::insulated_free;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
  bool operator==(const BoundaryRule& o) const {
    return tag == o.tag && lo == o.lo && hi == o.hi;
  }
};

// Mechanically clamped nodes: the heat Dirichlet edges, a coordinate box, a
// whole material region, or the vertices of the element containing a point.
struct ClampRule {
  enum class Kind { tagged_dirichlet, box, region, element_at };
  Kind kind = Kind::tagged_dirichlet;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
  std::string region;
  Vec2 point = Vec2::Zero();

  static ClampRule tagged_dirichlet() { return {}; }
  static ClampRule box(const Vec2& lo, const Vec2& hi) {
    ClampRule r;
    r.kind = Kind::box;
    r.lo = lo;
    r.hi = hi;
    return r;
  }
  static ClampRule region_named(const std::string& name) {
    ClampRule r;
    r.kind = Kind::region;
    r.region = name;
    return r;
  }
  static ClampRule element_at(const Vec2& p) {
    ClampRule r;
    r.kind = Kind::element_at;
    r.point = p;
    return r;
  }

  bool operator==(const ClampRule& o) const {
    return kind == o.kind && lo == o.lo && hi == o.hi && region == o.region &&
           point == o.point;
  }
};

struct MeshRecipe {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  int divisions_x = 1;
  int divisions_y = 1;
  int refinements = 0;
  RegionSpec regions;  // empty: single default region
  bool operator==(const MeshRecipe& o) const;
};

// Volumetric source in scenario form (region by name, resolved at setup).
struct SourceSpec {
  enum class Shape { circle, everywhere };
  Shape shape = Shape::everywhere;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  TimeFn rate;
  bool operator==(const SourceSpec& o) const {
    return shape == o.shape && center == o.center && radius == o.radius && rate == o.rate;
  }
};

enum class HeatMode { solve, prescribed };

struct ScenarioConfig {
  std::string name = "custom";
  MeshRecipe mesh;
  MaterialField material;
  std::vector<BoundaryRule> boundary;
  TimeFn theta_dirichlet;
  TimeFn theta_ext;
  std::vector<SourceSpec> sources;
  HeatMode heat_mode = HeatMode::solve;
  TimeFn prescribed_theta;  // spatially uniform, heat solve bypassed
  Obstacle obstacle;
  std::vector<ClampRule> clamps;
  double tau = 1e-3;             // s
  double epsilon = 1e-6;         // mm^4/MPa
  double t_max = 1.0;            // s
  double stationary_tol = 1e-5;
  bool stop_at_stationary = false;
  bool subiterate = false;       // optional re-projection inside step (2)
  int snapshot_every = 0;        // steps; 0 = ceil(t_max/tau/50)
  std::vector<double> snapshot_times;  // overrides the cadence when nonempty
  double char_time = 1.0;        // s, tau-epsilon consistency scale T
  double char_length = 1.0;      // mm, scale l

  bool operator==(const ScenarioConfig&) const;
};

// The five experiments with the published parameters; `refine_override < 0`
// keeps each scenario's desk-scale default.
ScenarioConfig builtin_scenario(const std::string& name, int refine_override = -1);

std::vector<std::string> builtin_scenario_names();

}  // namespace bilayer
