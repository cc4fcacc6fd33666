#include "bilayer/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace bilayer {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::dirichlet_clamped: return "dirichlet_clamped";
    case BoundaryTag::robin: return "robin";
    case BoundaryTag::insulated_free: return "insulated_free";
  }
  return "?";
}

double QuadMesh::element_area(int e) const {
  auto c = element_corners(e);
  double a = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2& p = c[i];
    const Vec2& q = c[(i + 1) % 4];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

double QuadMesh::total_area() const {
  double a = 0.0;
  for (int e = 0; e < num_elements(); ++e) a += element_area(e);
  return a;
}

double QuadMesh::max_element_extent() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    auto c = element_corners(e);
    for (int i = 0; i < 4; ++i) h = std::max(h, (c[(i + 1) % 4] - c[i]).norm());
  }
  return h;
}

int QuadMesh::region_id(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(region_names.size()); ++i)
    if (region_names[i] == name) return i;
  return -1;
}

std::vector<int> QuadMesh::boundary_edge_ids() const {
  std::vector<int> ids;
  for (int i = 0; i < num_edges(); ++i)
    if (edges[i].boundary()) ids.push_back(i);
  return ids;
}

std::vector<int> QuadMesh::nodes_with_tag(BoundaryTag tag) const {
  std::set<int> s;
  for (int i = 0; i < num_edges(); ++i) {
    if (edges[i].boundary() && boundary_tags[i] == tag) {
      s.insert(edges[i].a);
      s.insert(edges[i].b);
    }
  }
  return std::vector<int>(s.begin(), s.end());
}

namespace {

// Splits every interval of the sorted line set in two, `refinements` times.
std::vector<double> refine_lines(const std::vector<double>& base, int refinements) {
  std::vector<double> lines = base;
  for (int r = 0; r < refinements; ++r) {
    std::vector<double> next;
    next.reserve(2 * lines.size());
    for (size_t i = 0; i + 1 < lines.size(); ++i) {
      next.push_back(lines[i]);
      next.push_back(0.5 * (lines[i] + lines[i + 1]));
    }
    next.push_back(lines.back());
    lines = std::move(next);
  }
  return lines;
}

struct GridBuild {
  std::vector<double> xs, ys;
  // keep(cell center) decides which cells become elements
  std::function<bool(const Vec2&)> keep;
};

QuadMesh build_from_grid(const GridBuild& g, std::vector<double> base_x,
                         std::vector<double> base_y, int refinements) {
  const int nx = static_cast<int>(g.xs.size());
  const int ny = static_cast<int>(g.ys.size());
  QuadMesh mesh;
  mesh.base_x = std::move(base_x);
  mesh.base_y = std::move(base_y);
  mesh.refinements = refinements;

  std::vector<int> node_id(static_cast<size_t>(nx) * ny, -1);
  auto grid_node = [&](int ix, int iy) -> int& { return node_id[iy * nx + ix]; };

  // Elements in row-major cell order, nodes numbered on first use.
  std::vector<std::array<int, 2>> kept_cells;
  for (int iy = 0; iy + 1 < ny; ++iy) {
    for (int ix = 0; ix + 1 < nx; ++ix) {
      Vec2 center(0.5 * (g.xs[ix] + g.xs[ix + 1]), 0.5 * (g.ys[iy] + g.ys[iy + 1]));
      if (g.keep && !g.keep(center)) continue;
      kept_cells.push_back({ix, iy});
    }
  }
  for (auto [ix, iy] : kept_cells) {
    const int corners[4][2] = {{ix, iy}, {ix + 1, iy}, {ix + 1, iy + 1}, {ix, iy + 1}};
    std::array<int, 4> el{};
    for (int c = 0; c < 4; ++c) {
      int& id = grid_node(corners[c][0], corners[c][1]);
      if (id < 0) {
        id = mesh.num_nodes();
        mesh.nodes.emplace_back(g.xs[corners[c][0]], g.ys[corners[c][1]]);
      }
      el[c] = id;
    }
    mesh.elements.push_back(el);
  }
  if (mesh.elements.empty())
    throw std::invalid_argument("mesh construction produced no elements");

  // Edge table, first-seen order over element sides.
  std::map<std::pair<int, int>, int> edge_of;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int s = 0; s < 4; ++s) {
      int a = el[s], b = el[(s + 1) % 4];
      auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        MeshEdge edge;
        edge.a = key.first;
        edge.b = key.second;
        edge.elem_left = e;
        edge_of.emplace(key, mesh.num_edges());
        mesh.edges.push_back(edge);
      } else {
        MeshEdge& edge = mesh.edges[it->second];
        if (edge.elem_right >= 0)
          throw std::runtime_error("non-conforming mesh: edge shared by >2 elements");
        edge.elem_right = e;
      }
    }
  }
  mesh.boundary_tags.assign(mesh.num_edges(), BoundaryTag::insulated_free);
  mesh.region_tags.assign(mesh.num_elements(), 0);
  mesh.region_names = {"default"};
  return mesh;
}

void check_positive_orientation(const QuadMesh& mesh) {
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto c = mesh.element_corners(e);
    for (int i = 0; i < 4; ++i) {
      Vec2 u = c[(i + 1) % 4] - c[i];
      Vec2 v = c[(i + 3) % 4] - c[i];
      if (u.x() * v.y() - u.y() * v.x() <= 0.0)
        throw std::runtime_error("element with non-positive corner Jacobian");
    }
  }
}

std::vector<double> merged_lines(const std::vector<double>& base,
                                 const std::vector<double>& extra, double tol) {
  std::vector<double> lines = base;
  for (double v : extra) {
    bool found = false;
    for (double b : lines) {
      if (b == v) { found = true; break; }
      if (std::abs(b - v) < tol)
        throw std::invalid_argument(
            "region interface not alignable with existing grid line");
    }
    if (!found) lines.push_back(v);
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace

QuadMesh build_rectangle_mesh(const Vec2& lower, const Vec2& upper, int refinements) {
  return build_grid_mesh(lower, upper, 1, 1, refinements);
}

QuadMesh build_grid_mesh(const Vec2& lower, const Vec2& upper, int nx, int ny,
                         int refinements) {
  if (!(upper.x() > lower.x() && upper.y() > lower.y()))
    throw std::invalid_argument("degenerate rectangle: upper must exceed lower componentwise");
  if (refinements < 0) throw std::invalid_argument("refinements must be >= 0");
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid divisions must be >= 1");

  std::vector<double> base_x, base_y;
  for (int i = 0; i <= nx; ++i)
    base_x.push_back(lower.x() + (upper.x() - lower.x()) * i / nx);
  for (int j = 0; j <= ny; ++j)
    base_y.push_back(lower.y() + (upper.y() - lower.y()) * j / ny);
  GridBuild g;
  g.xs = refine_lines(base_x, refinements);
  g.ys = refine_lines(base_y, refinements);
  QuadMesh mesh = build_from_grid(g, base_x, base_y, refinements);
  check_positive_orientation(mesh);
  return mesh;
}

QuadMesh snap_region_mesh(const QuadMesh& mesh, const RegionSpec& regions) {
  if (regions.empty()) {
    QuadMesh out = mesh;
    out.region_tags.assign(out.num_elements(), 0);
    out.region_names = {"default"};
    return out;
  }
  const double diam = std::max(mesh.base_x.back() - mesh.base_x.front(),
                               mesh.base_y.back() - mesh.base_y.front());
  const double tol = 1e-9 * diam;

  std::vector<double> rx, ry;
  for (const auto& r : regions.regions) {
    if (!(r.hi.x() > r.lo.x() && r.hi.y() > r.lo.y()))
      throw std::invalid_argument("degenerate region: " + r.name);
    rx.push_back(r.lo.x());
    rx.push_back(r.hi.x());
    ry.push_back(r.lo.y());
    ry.push_back(r.hi.y());
  }
  std::vector<double> base_x = merged_lines(mesh.base_x, rx, tol);
  std::vector<double> base_y = merged_lines(mesh.base_y, ry, tol);

  auto region_of = [&regions, tol](const Vec2& p) -> int {
    int hit = -1;
    for (int i = 0; i < static_cast<int>(regions.regions.size()); ++i) {
      if (regions.regions[i].contains(p, tol)) {
        if (hit >= 0)
          throw std::invalid_argument("overlapping regions: " +
                                      regions.regions[hit].name + " and " +
                                      regions.regions[i].name);
        hit = i;
      }
    }
    return hit;
  };

  GridBuild g;
  g.xs = refine_lines(base_x, mesh.refinements);
  g.ys = refine_lines(base_y, mesh.refinements);
  g.keep = [&region_of](const Vec2& c) { return region_of(c) >= 0; };
  QuadMesh out = build_from_grid(g, base_x, base_y, mesh.refinements);

  out.region_names.clear();
  for (const auto& r : regions.regions) out.region_names.push_back(r.name);
  for (int e = 0; e < out.num_elements(); ++e)
    out.region_tags[e] = region_of(out.element_centroid(e));
  check_positive_orientation(out);
  return out;
}

QuadMesh tag_boundary(QuadMesh mesh,
                      const std::vector<std::pair<BoundaryTag, EdgePredicate>>& rules) {
  for (int i = 0; i < mesh.num_edges(); ++i) {
    if (!mesh.edges[i].boundary()) continue;
    Vec2 mid = 0.5 * (mesh.nodes[mesh.edges[i].a] + mesh.nodes[mesh.edges[i].b]);
    BoundaryTag tag = BoundaryTag::insulated_free;
    int matches = 0;
    for (const auto& [t, pred] : rules) {
      if (pred(mid)) {
        if (matches == 0) tag = t;
        ++matches;
      }
    }
    if (matches > 1)
      mesh.warnings.push_back("boundary edge " + std::to_string(i) +
                              " matched by multiple predicates; first match wins");
    mesh.boundary_tags[i] = tag;
  }
  return mesh;
}

void dump_mesh(const QuadMesh& mesh, std::ostream& out) {
  out << mesh.num_nodes() << " " << mesh.num_elements() << "\n";
  out.precision(17);
  for (int i = 0; i < mesh.num_nodes(); ++i)
    out << i << " " << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    out << e << " " << el[0] << " " << el[1] << " " << el[2] << " " << el[3] << "\n";
  }
}

}  // namespace bilayer
