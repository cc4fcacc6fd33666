#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bilayer/mesh.hpp"

using namespace bilayer;

namespace {
const double kPi = 3.14159265358979323846;

int count_boundary(const QuadMesh& m, BoundaryTag tag) {
  int k = 0;
  for (int i = 0; i < m.num_edges(); ++i)
    if (m.edges[i].boundary() && m.boundary_tags[i] == tag) ++k;
  return k;
}
}  // namespace

TEST_CASE("rectangle mesh base case") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 0);
  CHECK(m.num_elements() == 1);
  CHECK(m.num_nodes() == 4);
  CHECK(m.num_edges() == 4);
}

TEST_CASE("six refinements match the experiment resolution") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 6);
  CHECK(m.num_elements() == 4096);
  CHECK(m.num_nodes() == 65 * 65);
  CHECK(m.max_element_extent() == doctest::Approx(2.0 / 64).epsilon(1e-14));
}

TEST_CASE("one refinement quadruples elements") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 1);
  CHECK(m.num_elements() == 4);
  CHECK(m.num_nodes() == 9);
}

TEST_CASE("degenerate rectangle rejected") {
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0}, {0, 1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_rectangle_mesh({0, 0}, {1, 0}, 1), std::invalid_argument);
}

TEST_CASE("refinement preserves geometry and orientation") {
  for (int r : {0, 1, 3, 5}) {
    QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, r);
    CHECK(m.total_area() == doctest::Approx(4.0).epsilon(1e-14));
    for (int e = 0; e < m.num_elements(); ++e) CHECK(m.element_area(e) > 0.0);
  }
}

TEST_CASE("edge table consistency") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 3);
  int interior = 0, boundary = 0;
  for (const auto& e : m.edges) (e.boundary() ? boundary : interior)++;
  CHECK(4 * m.num_elements() == 2 * interior + boundary);
  CHECK(boundary == 4 * 8);
}

TEST_CASE("hinge strip snapping aligns the region interface") {
  const double a = -1.0 + kPi / 40.0;
  QuadMesh base = build_rectangle_mesh({-1, -1}, {1, 1}, 4);
  RegionSpec spec;
  spec.regions.push_back({"hinge", {-1, -1}, {a, 1}});
  spec.regions.push_back({"plate", {a, -1}, {1, 1}});
  QuadMesh m = snap_region_mesh(base, spec);

  CHECK(m.region_names.size() == 2);
  const int hinge = m.region_id("hinge");
  const int plate = m.region_id("plate");
  REQUIRE(hinge >= 0);
  REQUIRE(plate >= 0);
  for (int e = 0; e < m.num_elements(); ++e) {
    auto c = m.element_corners(e);
    const bool left = m.element_centroid(e).x() < a;
    CHECK(m.region_tags[e] == (left ? hinge : plate));
    // every element lies entirely inside its region
    for (const Vec2& p : c) {
      if (left) CHECK(p.x() <= a + 1e-13);
      else CHECK(p.x() >= a - 1e-13);
    }
  }
  // interface is meshed exactly: some corner sits on x = a
  bool found = false;
  for (const Vec2& p : m.nodes)
    if (std::abs(p.x() - a) < 1e-15) found = true;
  CHECK(found);
  CHECK(m.total_area() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("no regions keeps the default tag") {
  QuadMesh base = build_rectangle_mesh({0, 0}, {1, 1}, 2);
  QuadMesh m = snap_region_mesh(base, {});
  for (int t : m.region_tags) CHECK(t == 0);
  CHECK(m.region_names == std::vector<std::string>{"default"});
}

TEST_CASE("box cross layout covers 6 plates and 5 hinges disjointly") {
  const double w = kPi / 48.0;
  const double s = 1.0 + w;
  RegionSpec spec;
  auto plate = [&](const char* name, int i, int j) {
    spec.regions.push_back({name, {i * s, j * s}, {i * s + 1, j * s + 1}});
  };
  plate("center", 1, 1);
  plate("west", 0, 1);
  plate("east", 2, 1);
  plate("south", 1, 0);
  plate("north", 1, 2);
  plate("lid", 2, 2);
  spec.regions.push_back({"hinge_w", {1, s}, {s, s + 1}});
  spec.regions.push_back({"hinge_e", {s + 1, s}, {2 * s, s + 1}});
  spec.regions.push_back({"hinge_s", {s, 1}, {s + 1, s}});
  spec.regions.push_back({"hinge_n", {s, s + 1}, {s + 1, 2 * s}});
  spec.regions.push_back({"hinge_lid", {2 * s, s + 1}, {2 * s + 1, 2 * s}});

  QuadMesh base = build_rectangle_mesh({0, 0}, {2 * s + 1, 2 * s + 1}, 2);
  QuadMesh m = snap_region_mesh(base, spec);

  double area = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) area += m.element_area(e);
  CHECK(area == doctest::Approx(6.0 + 5.0 * w).epsilon(1e-12));
  // all 11 regions hit, conforming mesh
  std::vector<int> hits(m.region_names.size(), 0);
  for (int t : m.region_tags) hits[t]++;
  for (int h : hits) CHECK(h > 0);
  int interior = 0, boundary = 0;
  for (const auto& e : m.edges) (e.boundary() ? boundary : interior)++;
  CHECK(4 * m.num_elements() == 2 * interior + boundary);
}

TEST_CASE("overlapping regions rejected") {
  RegionSpec spec;
  spec.regions.push_back({"a", {0, 0}, {0.6, 1}});
  spec.regions.push_back({"b", {0.4, 0}, {1, 1}});
  QuadMesh base = build_rectangle_mesh({0, 0}, {1, 1}, 1);
  CHECK_THROWS_AS(snap_region_mesh(base, spec), std::invalid_argument);
}

TEST_CASE("near-coincident region interfaces rejected") {
  RegionSpec spec;
  spec.regions.push_back({"a", {0, 0}, {0.5, 1}});
  spec.regions.push_back({"b", {0.5 + 1e-13, 0}, {1, 1}});
  QuadMesh base = build_rectangle_mesh({0, 0}, {1, 1}, 1);
  // the two interface lines would create a sliver cell
  CHECK_THROWS_AS(snap_region_mesh(base, spec), std::invalid_argument);
}

TEST_CASE("boundary tagging by predicate, first match wins") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 1);
  m = tag_boundary(std::move(m),
                   {{BoundaryTag::dirichlet_clamped,
                     [](const Vec2& p) { return p.x() < -1 + 1e-9; }}});
  CHECK(count_boundary(m, BoundaryTag::dirichlet_clamped) == 2);
  CHECK(count_boundary(m, BoundaryTag::insulated_free) == 6);

  QuadMesh all = build_rectangle_mesh({-1, -1}, {1, 1}, 2);
  all = tag_boundary(std::move(all), {{BoundaryTag::robin, [](const Vec2&) { return true; }}});
  CHECK(count_boundary(all, BoundaryTag::robin) == 16);

  QuadMesh none = build_rectangle_mesh({-1, -1}, {1, 1}, 1);
  none = tag_boundary(std::move(none), {});
  CHECK(count_boundary(none, BoundaryTag::insulated_free) == 8);
}

TEST_CASE("overlap warning recorded") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 1);
  m = tag_boundary(std::move(m), {{BoundaryTag::robin, [](const Vec2&) { return true; }},
                                  {BoundaryTag::dirichlet_clamped,
                                   [](const Vec2& p) { return p.x() < -1 + 1e-9; }}});
  CHECK(!m.warnings.empty());
  CHECK(count_boundary(m, BoundaryTag::robin) == 8);
}

TEST_CASE("mesh dump format") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 0);
  std::ostringstream os;
  dump_mesh(m, os);
  std::istringstream is(os.str());
  int nn, ne;
  is >> nn >> ne;
  CHECK(nn == 4);
  CHECK(ne == 1);
  int idx;
  double x, y;
  is >> idx >> x >> y;
  CHECK(idx == 0);
  int e, n0, n1, n2, n3;
  for (int i = 0; i < 3; ++i) is >> idx >> x >> y;
  is >> e >> n0 >> n1 >> n2 >> n3;
  CHECK(e == 0);
  CHECK(n0 + n1 + n2 + n3 == 6);
}
