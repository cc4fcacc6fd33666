#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bilayer {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class BoundaryTag { dirichlet_clamped, robin, insulated_free };

const char* to_string(BoundaryTag tag);

struct MeshEdge {
  int a = -1, b = -1;             // node indices, a < b
  int elem_left = -1;             // first element that produced the edge
  int elem_right = -1;            // second adjacent element, -1 on the boundary
  bool boundary() const { return elem_right < 0; }
};

// Named axis-aligned rectangle carrying a material region id.
struct Region {
  std::string name;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
           p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
  }
};

struct RegionSpec {
  std::vector<Region> regions;
  bool empty() const { return regions.empty(); }
};

// Conforming quadrilateral mesh of a tensor-product grid, possibly with cells
// dropped outside a union of regions.  Node, edge and element indices are
// deterministic functions of the construction order.
struct QuadMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 4>> elements;  // counterclockwise corners
  std::vector<MeshEdge> edges;
  std::vector<BoundaryTag> boundary_tags;    // per edge, meaningful on boundary edges
  std::vector<int> region_tags;              // per element, index into region_names
  std::vector<std::string> region_names;
  std::vector<std::string> warnings;

  // Construction provenance: base grid lines before uniform refinement.
  std::vector<double> base_x, base_y;
  int refinements = 0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::array<Vec2, 4> element_corners(int e) const {
    const auto& el = elements[e];
    return {nodes[el[0]], nodes[el[1]], nodes[el[2]], nodes[el[3]]};
  }
  Vec2 element_centroid(int e) const {
    auto c = element_corners(e);
    return 0.25 * (c[0] + c[1] + c[2] + c[3]);
  }
  double element_area(int e) const;
  double total_area() const;
  double max_element_extent() const;  // largest element side length
  int region_id(const std::string& name) const;  // -1 if absent

  std::vector<int> boundary_edge_ids() const;
  std::vector<int> nodes_with_tag(BoundaryTag tag) const;
};

// 4^refinements congruent cells of the rectangle [lower, upper].
QuadMesh build_rectangle_mesh(const Vec2& lower, const Vec2& upper, int refinements);

// nx*ny base cells, each split 4^refinements times.
QuadMesh build_grid_mesh(const Vec2& lower, const Vec2& upper, int nx, int ny,
                         int refinements = 0);

// Rebuilds the mesh with grid lines inserted at every region interface before
// refinement, drops cells outside the union of regions and assigns region
// tags.  Boundary tags are reset; retag afterwards.
QuadMesh snap_region_mesh(const QuadMesh& mesh, const RegionSpec& regions);

// Ordered first-match classification of boundary edge midpoints; unmatched
// edges stay insulated_free.  Overlaps are resolved first-match with a
// warning recorded on the mesh.
using EdgePredicate = std::function<bool(const Vec2& midpoint)>;
QuadMesh tag_boundary(QuadMesh mesh,
                      const std::vector<std::pair<BoundaryTag, EdgePredicate>>& rules);

// Plain-text debug dump: header with counts, one node per line (index x y),
// one element per line (index n0 n1 n2 n3).
void dump_mesh(const QuadMesh& mesh, std::ostream& out);

}  // namespace bilayer
