#include "bilayer/config_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bilayer {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Parser {
  std::vector<std::string> errors;
  int line = 0;

  void error(const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  }

  // "<number> <unit>"; unit must match exactly; empty expected = bare number
  std::optional<double> quantity(const std::string& text, const std::string& unit,
                                 const std::string& where) {
    std::istringstream is(trim(text));
    double v;
    if (!(is >> v)) {
      error(where + ": expected a number, got '" + text + "'");
      return std::nullopt;
    }
    std::string u;
    is >> u;
    std::string rest;
    is >> rest;
    if (!rest.empty()) {
      error(where + ": trailing input '" + rest + "'");
      return std::nullopt;
    }
    if (u != unit) {
      error(where + ": expected unit '" + (unit.empty() ? "(none)" : unit) + "', got '" +
            (u.empty() ? "(none)" : u) + "'");
      return std::nullopt;
    }
    return v;
  }

  // "(x mm, y mm)" possibly followed by more text; consumed part is removed
  std::optional<Vec2> point2(std::string& text, const std::string& where) {
    const size_t open = text.find('(');
    const size_t close = text.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      error(where + ": expected '(x mm, y mm)'");
      return std::nullopt;
    }
    std::string inner = text.substr(open + 1, close - open - 1);
    text = trim(text.substr(close + 1));
    const size_t comma = inner.find(',');
    if (comma == std::string::npos) {
      error(where + ": expected two comma-separated coordinates");
      return std::nullopt;
    }
    auto x = quantity(inner.substr(0, comma), "mm", where);
    auto y = quantity(inner.substr(comma + 1), "mm", where);
    if (!x || !y) return std::nullopt;
    return Vec2(*x, *y);
  }

  std::optional<Vec3> point3(std::string& text, const std::string& where) {
    const size_t open = text.find('(');
    const size_t close = text.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      error(where + ": expected '(x mm, y mm, z mm)'");
      return std::nullopt;
    }
    std::string inner = text.substr(open + 1, close - open - 1);
    text = trim(text.substr(close + 1));
    std::vector<std::string> parts;
    std::istringstream is(inner);
    std::string part;
    while (std::getline(is, part, ',')) parts.push_back(part);
    if (parts.size() != 3) {
      error(where + ": expected three coordinates");
      return std::nullopt;
    }
    auto x = quantity(parts[0], "mm", where);
    auto y = quantity(parts[1], "mm", where);
    auto z = quantity(parts[2], "mm", where);
    if (!x || !y || !z) return std::nullopt;
    return Vec3(*x, *y, *z);
  }

  std::optional<TimeFn> timefn(const std::string& text, const std::string& unit,
                               const std::string& where) {
    std::string t = trim(text);
    auto args_of = [&](size_t prefix) -> std::optional<std::vector<std::string>> {
      if (t.back() != ')') {
        error(where + ": expected closing ')'");
        return std::nullopt;
      }
      std::string inner = t.substr(prefix, t.size() - prefix - 1);
      std::vector<std::string> parts;
      std::istringstream is(inner);
      std::string part;
      while (std::getline(is, part, ',')) parts.push_back(part);
      return parts;
    };
    if (t.rfind("const(", 0) == 0) {
      auto args = args_of(6);
      if (!args || args->size() != 1) {
        error(where + ": const(value)");
        return std::nullopt;
      }
      auto v = quantity((*args)[0], unit, where);
      if (!v) return std::nullopt;
      return TimeFn::constant_fn(*v);
    }
    if (t.rfind("ramp(", 0) == 0) {
      auto args = args_of(5);
      if (!args || args->size() != 2) {
        error(where + ": ramp(value, duration)");
        return std::nullopt;
      }
      auto v = quantity((*args)[0], unit, where);
      auto d = quantity((*args)[1], "s", where);
      if (!v || !d) return std::nullopt;
      return TimeFn::ramp_fn(*v, *d);
    }
    if (t.rfind("pulse(", 0) == 0) {
      auto args = args_of(6);
      if (!args || args->size() != 3) {
        error(where + ": pulse(value, t_on, t_off)");
        return std::nullopt;
      }
      auto v = quantity((*args)[0], unit, where);
      auto a = quantity((*args)[1], "s", where);
      auto b = quantity((*args)[2], "s", where);
      if (!v || !a || !b) return std::nullopt;
      return TimeFn::pulse_fn(*v, *a, *b);
    }
    error(where + ": expected const(...), ramp(...) or pulse(...)");
    return std::nullopt;
  }

  std::optional<bool> boolean(const std::string& text, const std::string& where) {
    std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    error(where + ": expected true or false");
    return std::nullopt;
  }
};

std::string timefn_str(const TimeFn& fn, const std::string& unit) {
  switch (fn.kind) {
    case TimeFn::Kind::constant: return "const(" + fmt(fn.value) + " " + unit + ")";
    case TimeFn::Kind::ramp:
      return "ramp(" + fmt(fn.value) + " " + unit + ", " + fmt(fn.t1) + " s)";
    case TimeFn::Kind::pulse:
      return "pulse(" + fmt(fn.value) + " " + unit + ", " + fmt(fn.t0) + " s, " +
             fmt(fn.t1) + " s)";
  }
  return "";
}

std::string point2_str(const Vec2& p) {
  return "(" + fmt(p.x()) + " mm, " + fmt(p.y()) + " mm)";
}
std::string point3_str(const Vec3& p) {
  return "(" + fmt(p.x()) + " mm, " + fmt(p.y()) + " mm, " + fmt(p.z()) + " mm)";
}

}  // namespace

ConfigParseResult parse_config_text(const std::string& text) {
  Parser P;
  ScenarioConfig c;
  c.mesh.refinements = -1;  // required fields tracked by sentinels
  c.tau = 0.0;
  c.epsilon = 0.0;
  c.t_max = 0.0;
  bool have_domain = false, have_obstacle_type = false;
  std::string obstacle_type;
  double obstacle_height = 0.0, sphere_radius = 0.0;
  std::vector<Vec3> sphere_centers;
  std::vector<std::string> seen_sections;

  std::istringstream is(text);
  std::string raw;
  std::string section;
  while (std::getline(is, raw)) {
    ++P.line;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        P.error("malformed section header");
        continue;
      }
      section = line.substr(1, line.size() - 2);
      seen_sections.push_back(section);
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      P.error("expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    const std::string where = "[" + section + "]." + key;

    if (section.empty()) {
      if (key == "name") c.name = value;
      else P.error("unknown key '" + key + "' before any section");
    } else if (section == "mesh") {
      if (key == "domain") {
        auto lo = P.point2(value, where);
        auto hi = P.point2(value, where);
        if (lo && hi) {
          c.mesh.lo = *lo;
          c.mesh.hi = *hi;
          have_domain = true;
        }
      } else if (key == "divisions") {
        std::istringstream vs(value);
        if (!(vs >> c.mesh.divisions_x >> c.mesh.divisions_y))
          P.error(where + ": expected two integers");
      } else if (key == "refinements") {
        auto v = P.quantity(value, "", where);
        if (v) {
          if (*v < 0 || *v != std::floor(*v)) P.error(where + ": must be a nonnegative integer");
          else c.mesh.refinements = static_cast<int>(*v);
        }
      } else if (key.rfind("region.", 0) == 0) {
        Region r;
        r.name = key.substr(7);
        auto lo = P.point2(value, where);
        auto hi = P.point2(value, where);
        if (lo && hi) {
          r.lo = *lo;
          r.hi = *hi;
          c.mesh.regions.regions.push_back(r);
        }
      } else {
        P.error("unknown key '" + key + "' in [mesh]");
      }
    } else if (section.rfind("material.", 0) == 0) {
      const std::string region = section.substr(9);
      RegionMaterial& m = c.material.regions[region];
      if (key == "mu_bar") {
        if (auto v = P.quantity(value, "MPa", where)) m.mu_bar = *v;
      } else if (key == "alpha_bar") {
        if (auto v = P.quantity(value, "per_mm_C", where)) m.alpha_bar = *v;
      } else if (key == "diffusivity") {
        if (auto v = P.quantity(value, "mm2_per_s", where)) m.diffusivity = *v;
      } else {
        P.error("unknown key '" + key + "' in [" + section + "]");
      }
    } else if (section == "boundary") {
      if (key == "robin_velocity") {
        if (auto v = P.quantity(value, "mm_per_s", where)) c.material.robin_velocity = *v;
      } else if (key == "dirichlet" || key == "robin" || key == "insulated") {
        BoundaryRule r;
        r.tag = key == "dirichlet" ? BoundaryTag::dirichlet_clamped
                : key == "robin"   ? BoundaryTag::robin
                                   : BoundaryTag::insulated_free;
        auto lo = P.point2(value, where);
        auto hi = P.point2(value, where);
        if (lo && hi) {
          r.lo = *lo;
          r.hi = *hi;
          c.boundary.push_back(r);
        }
      } else if (key == "theta_dirichlet") {
        if (auto f = P.timefn(value, "C", where)) c.theta_dirichlet = *f;
      } else if (key == "theta_ext") {
        if (auto f = P.timefn(value, "C", where)) c.theta_ext = *f;
      } else if (key == "prescribed_theta") {
        if (auto f = P.timefn(value, "C", where)) {
          c.prescribed_theta = *f;
          c.heat_mode = HeatMode::prescribed;
        }
      } else if (key == "source") {
        SourceSpec s;
        if (value.rfind("circle", 0) == 0) {
          s.shape = SourceSpec::Shape::circle;
          std::string rest = trim(value.substr(6));
          auto center = P.point2(rest, where);
          if (!center) continue;
          s.center = *center;
          // radius then rate function
          const size_t sp = rest.find("mm");
          if (sp == std::string::npos) {
            P.error(where + ": expected 'circle (c) <radius> mm <rate fn>'");
            continue;
          }
          auto radius = P.quantity(rest.substr(0, sp + 2), "mm", where);
          if (!radius) continue;
          s.radius = *radius;
          auto rate = P.timefn(rest.substr(sp + 2), "C_per_s", where);
          if (!rate) continue;
          s.rate = *rate;
        } else if (value.rfind("everywhere", 0) == 0) {
          s.shape = SourceSpec::Shape::everywhere;
          auto rate = P.timefn(trim(value.substr(10)), "C_per_s", where);
          if (!rate) continue;
          s.rate = *rate;
        } else {
          P.error(where + ": expected 'circle ...' or 'everywhere ...'");
          continue;
        }
        c.sources.push_back(s);
      } else if (key == "clamp") {
        ClampRule r;
        if (value == "tagged_dirichlet") {
          r.kind = ClampRule::Kind::tagged_dirichlet;
        } else if (value.rfind("box", 0) == 0) {
          r.kind = ClampRule::Kind::box;
          std::string rest = trim(value.substr(3));
          auto lo = P.point2(rest, where);
          auto hi = P.point2(rest, where);
          if (!lo || !hi) continue;
          r.lo = *lo;
          r.hi = *hi;
        } else if (value.rfind("region", 0) == 0) {
          r.kind = ClampRule::Kind::region;
          r.region = trim(value.substr(6));
          if (r.region.empty()) {
            P.error(where + ": expected 'region <name>'");
            continue;
          }
        } else if (value.rfind("element_at", 0) == 0) {
          r.kind = ClampRule::Kind::element_at;
          std::string rest = trim(value.substr(10));
          auto pt = P.point2(rest, where);
          if (!pt) continue;
          r.point = *pt;
        } else {
          P.error(where + ": unknown clamp rule '" + value + "'");
          continue;
        }
        c.clamps.push_back(r);
      } else {
        P.error("unknown key '" + key + "' in [boundary]");
      }
    } else if (section == "obstacle") {
      if (key == "type") {
        obstacle_type = value;
        have_obstacle_type = true;
        if (value != "none" && value != "halfspace" && value != "spheres")
          P.error(where + ": expected none, halfspace or spheres");
      } else if (key == "height") {
        if (auto v = P.quantity(value, "mm", where)) obstacle_height = *v;
      } else if (key == "radius") {
        if (auto v = P.quantity(value, "mm", where)) sphere_radius = *v;
      } else if (key == "sphere") {
        std::string rest = value;
        if (auto p = P.point3(rest, where)) sphere_centers.push_back(*p);
      } else {
        P.error("unknown key '" + key + "' in [obstacle]");
      }
    } else if (section == "time") {
      if (key == "tau") {
        if (auto v = P.quantity(value, "s", where)) {
          if (*v <= 0) P.error(where + ": must be positive");
          else c.tau = *v;
        }
      } else if (key == "t_max") {
        if (auto v = P.quantity(value, "s", where)) {
          if (*v <= 0) P.error(where + ": must be positive");
          else c.t_max = *v;
        }
      } else if (key == "stationary_tol") {
        if (auto v = P.quantity(value, "", where)) c.stationary_tol = *v;
      } else if (key == "stop_at_stationary") {
        if (auto v = P.boolean(value, where)) c.stop_at_stationary = *v;
      } else if (key == "subiterate") {
        if (auto v = P.boolean(value, where)) c.subiterate = *v;
      } else if (key == "char_time") {
        if (auto v = P.quantity(value, "s", where)) c.char_time = *v;
      } else if (key == "char_length") {
        if (auto v = P.quantity(value, "mm", where)) c.char_length = *v;
      } else {
        P.error("unknown key '" + key + "' in [time]");
      }
    } else if (section == "penalty") {
      if (key == "epsilon") {
        if (auto v = P.quantity(value, "mm4_per_MPa", where)) {
          if (*v <= 0) P.error(where + ": must be positive");
          else c.epsilon = *v;
        }
      } else {
        P.error("unknown key '" + key + "' in [penalty]");
      }
    } else if (section == "output") {
      if (key == "snapshot_every") {
        if (auto v = P.quantity(value, "", where)) c.snapshot_every = static_cast<int>(*v);
      } else if (key == "snapshot_times") {
        std::istringstream vs(value);
        std::string part;
        bool ok = true;
        std::vector<double> times;
        while (std::getline(vs, part, ',')) {
          auto v = P.quantity(part, "s", where);
          if (!v) { ok = false; break; }
          times.push_back(*v);
        }
        if (ok) c.snapshot_times = times;
      } else {
        P.error("unknown key '" + key + "' in [output]");
      }
    } else {
      P.error("unknown section [" + section + "]");
      section.clear();
    }
  }

  auto require = [&](bool present, const std::string& what) {
    if (!present) P.errors.push_back("missing " + what);
  };
  require(have_domain, "[mesh].domain");
  require(c.mesh.refinements >= 0, "[mesh].refinements");
  require(c.tau > 0.0, "[time].tau");
  require(c.t_max > 0.0, "[time].t_max");
  require(c.epsilon > 0.0, "[penalty].epsilon");
  require(!c.material.regions.empty(), "[material.<region>] section");
  require(have_obstacle_type, "[obstacle].type");

  if (have_obstacle_type) {
    if (obstacle_type == "halfspace") c.obstacle = Obstacle::halfspace(obstacle_height);
    else if (obstacle_type == "spheres") {
      if (sphere_centers.empty() || sphere_radius <= 0.0)
        P.errors.push_back("[obstacle]: spheres need at least one center and a radius");
      else c.obstacle = Obstacle::sphere_union(sphere_centers, sphere_radius);
    }
  }

  ConfigParseResult result;
  result.errors = P.errors;
  if (P.errors.empty()) result.config = c;
  return result;
}

ConfigParseResult parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ConfigParseResult r;
    r.errors.push_back("cannot read config file: " + path);
    return r;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "name = " << c.name << "\n\n";
  os << "[mesh]\n";
  os << "domain = " << point2_str(c.mesh.lo) << " " << point2_str(c.mesh.hi) << "\n";
  os << "divisions = " << c.mesh.divisions_x << " " << c.mesh.divisions_y << "\n";
  os << "refinements = " << c.mesh.refinements << "\n";
  for (const Region& r : c.mesh.regions.regions)
    os << "region." << r.name << " = " << point2_str(r.lo) << " " << point2_str(r.hi) << "\n";

  for (const auto& [name, m] : c.material.regions) {
    os << "\n[material." << name << "]\n";
    os << "mu_bar = " << fmt(m.mu_bar) << " MPa\n";
    os << "alpha_bar = " << fmt(m.alpha_bar) << " per_mm_C\n";
    os << "diffusivity = " << fmt(m.diffusivity) << " mm2_per_s\n";
  }

  os << "\n[boundary]\n";
  os << "robin_velocity = " << fmt(c.material.robin_velocity) << " mm_per_s\n";
  for (const BoundaryRule& r : c.boundary) {
    const char* key = r.tag == BoundaryTag::dirichlet_clamped ? "dirichlet"
                      : r.tag == BoundaryTag::robin           ? "robin"
                                                              : "insulated";
    os << key << " = " << point2_str(r.lo) << " " << point2_str(r.hi) << "\n";
  }
  os << "theta_dirichlet = " << timefn_str(c.theta_dirichlet, "C") << "\n";
  os << "theta_ext = " << timefn_str(c.theta_ext, "C") << "\n";
  if (c.heat_mode == HeatMode::prescribed)
    os << "prescribed_theta = " << timefn_str(c.prescribed_theta, "C") << "\n";
  for (const SourceSpec& s : c.sources) {
    if (s.shape == SourceSpec::Shape::circle)
      os << "source = circle " << point2_str(s.center) << " " << fmt(s.radius) << " mm "
         << timefn_str(s.rate, "C_per_s") << "\n";
    else
      os << "source = everywhere " << timefn_str(s.rate, "C_per_s") << "\n";
  }
  for (const ClampRule& r : c.clamps) {
    switch (r.kind) {
      case ClampRule::Kind::tagged_dirichlet: os << "clamp = tagged_dirichlet\n"; break;
      case ClampRule::Kind::box:
        os << "clamp = box " << point2_str(r.lo) << " " << point2_str(r.hi) << "\n";
        break;
      case ClampRule::Kind::region: os << "clamp = region " << r.region << "\n"; break;
      case ClampRule::Kind::element_at:
        os << "clamp = element_at " << point2_str(r.point) << "\n";
        break;
    }
  }

  os << "\n[obstacle]\n";
  switch (c.obstacle.kind) {
    case Obstacle::Kind::none: os << "type = none\n"; break;
    case Obstacle::Kind::halfspace:
      os << "type = halfspace\nheight = " << fmt(c.obstacle.height) << " mm\n";
      break;
    case Obstacle::Kind::spheres:
      os << "type = spheres\nradius = " << fmt(c.obstacle.radius) << " mm\n";
      for (const Vec3& p : c.obstacle.centers) os << "sphere = " << point3_str(p) << "\n";
      break;
  }

  os << "\n[time]\n";
  os << "tau = " << fmt(c.tau) << " s\n";
  os << "t_max = " << fmt(c.t_max) << " s\n";
  os << "stationary_tol = " << fmt(c.stationary_tol) << "\n";
  os << "stop_at_stationary = " << (c.stop_at_stationary ? "true" : "false") << "\n";
  os << "subiterate = " << (c.subiterate ? "true" : "false") << "\n";
  os << "char_time = " << fmt(c.char_time) << " s\n";
  os << "char_length = " << fmt(c.char_length) << " mm\n";

  os << "\n[penalty]\n";
  os << "epsilon = " << fmt(c.epsilon) << " mm4_per_MPa\n";

  os << "\n[output]\n";
  os << "snapshot_every = " << c.snapshot_every << "\n";
  if (!c.snapshot_times.empty()) {
    os << "snapshot_times = ";
    for (size_t i = 0; i < c.snapshot_times.size(); ++i)
      os << (i ? ", " : "") << fmt(c.snapshot_times[i]) << " s";
    os << "\n";
  }
  return os.str();
}

}  // namespace bilayer
