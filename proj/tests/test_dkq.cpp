#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "bilayer/assembly.hpp"
#include "bilayer/dkq.hpp"
#include "bilayer/mesh.hpp"

using namespace bilayer;

namespace {

using Poly = std::function<double(const Vec2&)>;
using PolyGrad = std::function<Vec2(const Vec2&)>;

// Local dofs of a smooth function on a physical element.
Eigen::Matrix<double, 12, 1> interpolate(const ElementGeometry& g, const Poly& f,
                                         const PolyGrad& df) {
  Eigen::Matrix<double, 12, 1> d;
  for (int i = 0; i < 4; ++i) {
    Vec2 x = g.corners[i];
    d(3 * i) = f(x);
    Vec2 gr = df(x);
    d(3 * i + 1) = gr.x();
    d(3 * i + 2) = gr.y();
  }
  return d;
}

ElementGeometry reference_square() {
  return {{Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)}};
}

}  // namespace

TEST_CASE("duality of dofs and shape functions") {
  DkqBasis basis(reference_square());
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i < 4; ++i) {
      Vec2 v = DkqBasis::reference_corners()[i];
      CHECK(basis.value(j, v) == doctest::Approx(j == 3 * i ? 1.0 : 0.0).epsilon(1e-12));
      Vec2 g = basis.physical_gradient(j, v);
      CHECK(g.x() == doctest::Approx(j == 3 * i + 1 ? 1.0 : 0.0).epsilon(1e-12));
      CHECK(g.y() == doctest::Approx(j == 3 * i + 2 ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("duality on a stretched physical element") {
  ElementGeometry g{{Vec2(0.3, -0.1), Vec2(1.7, -0.1), Vec2(1.7, 0.5), Vec2(0.3, 0.5)}};
  DkqBasis basis(g);
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i < 4; ++i) {
      Vec2 v = DkqBasis::reference_corners()[i];
      CHECK(basis.value(j, v) == doctest::Approx(j == 3 * i ? 1.0 : 0.0).epsilon(1e-12));
      Vec2 gr = basis.physical_gradient(j, v);
      CHECK(gr.x() == doctest::Approx(j == 3 * i + 1 ? 1.0 : 0.0).epsilon(1e-12));
      CHECK(gr.y() == doctest::Approx(j == 3 * i + 2 ? 1.0 : 0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("edge midpoint constraint holds for every shape function") {
  for (const ElementGeometry& g :
       {reference_square(),
        ElementGeometry{{Vec2(0, 0), Vec2(0.0785, 0), Vec2(0.0785, 2), Vec2(0, 2)}}}) {
    DkqBasis basis(g);
    const auto& rc = DkqBasis::reference_corners();
    for (int j = 0; j < 12; ++j) {
      for (int e = 0; e < 4; ++e) {
        const int i0 = e, i1 = (e + 1) % 4;
        Vec2 t = g.corners[i1] - g.corners[i0];
        Vec2 n(t.y(), -t.x());
        n.normalize();
        Vec2 zm = 0.5 * (rc[i0] + rc[i1]);
        double lhs = basis.physical_gradient(j, zm).dot(n);
        double rhs = 0.5 * (basis.physical_gradient(j, rc[i0]).dot(n) +
                            basis.physical_gradient(j, rc[i1]).dot(n));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("value shape functions form a partition of unity") {
  DkqBasis basis(reference_square());
  for (double x : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
    for (double y : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += basis.value(3 * i, {x, y});
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("quadratics are reproduced pointwise") {
  std::vector<std::pair<Poly, PolyGrad>> polys = {
      {[](const Vec2&) { return 1.0; }, [](const Vec2&) { return Vec2(0, 0); }},
      {[](const Vec2& p) { return p.x(); }, [](const Vec2&) { return Vec2(1, 0); }},
      {[](const Vec2& p) { return p.y(); }, [](const Vec2&) { return Vec2(0, 1); }},
      {[](const Vec2& p) { return p.x() * p.x(); },
       [](const Vec2& p) { return Vec2(2 * p.x(), 0); }},
      {[](const Vec2& p) { return p.x() * p.y(); },
       [](const Vec2& p) { return Vec2(p.y(), p.x()); }},
      {[](const Vec2& p) { return p.y() * p.y(); },
       [](const Vec2& p) { return Vec2(0, 2 * p.y()); }},
  };
  for (const ElementGeometry& g :
       {reference_square(),
        ElementGeometry{{Vec2(2, 1), Vec2(2.25, 1), Vec2(2.25, 1.06), Vec2(2, 1.06)}}}) {
    DkqBasis basis(g);
    for (const auto& [f, df] : polys) {
      auto dofs = interpolate(g, f, df);
      for (int i = 0; i <= 4; ++i) {
        for (int j = 0; j <= 4; ++j) {
          Vec2 ref(-1.0 + 0.5 * i, -1.0 + 0.5 * j);
          Vec2 x = g.map(ref);
          CHECK(basis.evaluate(dofs, ref) == doctest::Approx(f(x)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("discrete gradient map row structure") {
  ElementGeometry g{{Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(0, 1)}};
  DkqBasis basis(g);
  const auto& G = basis.gradient_map();
  // vertex rows copy nodal gradient dofs
  for (int a = 0; a < 4; ++a) {
    for (int j = 0; j < 12; ++j) {
      CHECK(G(2 * a, j) == doctest::Approx(j == 3 * a + 1 ? 1 : 0));
      CHECK(G(2 * a + 1, j) == doctest::Approx(j == 3 * a + 2 ? 1 : 0));
    }
  }
  // center row is the mean of the vertex rows
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 12; ++j)
      CHECK(G(16 + c, j) ==
            doctest::Approx(0.25 * (G(0 + c, j) + G(2 + c, j) + G(4 + c, j) + G(6 + c, j))));
  // midpoint rows evaluate the reduced cubic
  for (int e = 0; e < 4; ++e) {
    Vec2 zm = 0.5 * (DkqBasis::reference_corners()[e] +
                     DkqBasis::reference_corners()[(e + 1) % 4]);
    for (int j = 0; j < 12; ++j) {
      Eigen::Matrix<double, 12, 1> unit = Eigen::Matrix<double, 12, 1>::Zero();
      unit(j) = 1.0;
      Vec2 pg = basis.physical_gradient(j, zm);
      CHECK(G(2 * (4 + e), j) == doctest::Approx(pg.x()).epsilon(1e-12));
      CHECK(G(2 * (4 + e) + 1, j) == doctest::Approx(pg.y()).epsilon(1e-12));
    }
  }
}

TEST_CASE("discrete gradient is exact for quadratics at all nine points") {
  ElementGeometry g{{Vec2(0.5, 0.25), Vec2(1.25, 0.25), Vec2(1.25, 0.75), Vec2(0.5, 0.75)}};
  DkqBasis basis(g);
  Poly f = [](const Vec2& p) { return 0.3 * p.x() * p.x() - p.x() * p.y() + 2 * p.y() * p.y() + p.x(); };
  PolyGrad df = [](const Vec2& p) {
    return Vec2(0.6 * p.x() - p.y() + 1, -p.x() + 4 * p.y());
  };
  auto dofs = interpolate(g, f, df);
  Eigen::Matrix<double, 18, 1> c = basis.gradient_map() * dofs;
  for (int a = 0; a < 9; ++a) {
    Vec2 x = g.map(DkqBasis::quadratic_points()[a]);
    CHECK(c(2 * a) == doctest::Approx(df(x).x()).epsilon(1e-12));
    CHECK(c(2 * a + 1) == doctest::Approx(df(x).y()).epsilon(1e-12));
  }
}

TEST_CASE("discrete gradient of a cubic is averaged, not exact") {
  DkqBasis basis(reference_square());
  Poly f = [](const Vec2& p) { return p.x() * p.x() * p.x(); };
  PolyGrad df = [](const Vec2& p) { return Vec2(3 * p.x() * p.x(), 0); };
  auto dofs = interpolate(reference_square(), f, df);
  Eigen::Matrix<double, 18, 1> c = basis.gradient_map() * dofs;
  // center coefficient is the mean of the corner values 3 x^2 = 3
  CHECK(c(16) == doctest::Approx(3.0).epsilon(1e-12));
  // the exact gradient at the center is 0
  CHECK(df({0, 0}).x() == 0.0);
}

TEST_CASE("constant fields have zero discrete gradient") {
  DkqBasis basis(reference_square());
  Eigen::Matrix<double, 12, 1> dofs = Eigen::Matrix<double, 12, 1>::Zero();
  dofs(0) = dofs(3) = dofs(6) = dofs(9) = 7.5;
  CHECK((basis.gradient_map() * dofs).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("bending energy of x1^2 on the reference square") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 0);
  ElementTable table(m);
  SparseMat K = assemble_bending_matrix(m, table, Eigen::VectorXd::Ones(1));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(9 * m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) {
    const double x = m.nodes[n].x();
    y(dof_value(n, 0)) = x * x;
    y(dof_grad(n, 0, 0)) = 2 * x;
  }
  CHECK(y.dot(K * y) == doctest::Approx(16.0).epsilon(1e-12));

  SparseMat K2 = assemble_bending_matrix(m, table, 2.0 * Eigen::VectorXd::Ones(1));
  CHECK(y.dot(K2 * y) == doctest::Approx(32.0).epsilon(1e-12));
}

TEST_CASE("affine deformations are in the bending kernel") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {2, 1}, 2);
  ElementTable table(m);
  SparseMat K = assemble_bending_matrix(m, table, Eigen::VectorXd::Ones(m.num_elements()));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(9 * m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) {
    const Vec2 p = m.nodes[n];
    for (int c = 0; c < 3; ++c) {
      y(dof_value(n, c)) = 0.3 * c + 1.2 * p.x() - 0.7 * p.y();
      y(dof_grad(n, 0, c)) = 1.2;
      y(dof_grad(n, 1, c)) = -0.7;
    }
  }
  CHECK((K * y).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("non-positive bending coefficient rejected") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 0);
  ElementTable table(m);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(assemble_bending_matrix(m, table, mu), std::invalid_argument);
}

TEST_CASE("patch exactness for a global quadratic on a snapped mesh") {
  const double a = -1.0 + 3.14159265358979323846 / 40.0;
  QuadMesh base = build_rectangle_mesh({-1, -1}, {1, 1}, 3);
  RegionSpec spec;
  spec.regions.push_back({"hinge", {-1, -1}, {a, 1}});
  spec.regions.push_back({"plate", {a, -1}, {1, 1}});
  QuadMesh m = snap_region_mesh(base, spec);
  ElementTable table(m);

  Eigen::VectorXd mu(m.num_elements());
  for (int e = 0; e < m.num_elements(); ++e) mu(e) = m.region_tags[e] == 0 ? 2.0 : 0.5;
  SparseMat K = assemble_bending_matrix(m, table, mu);

  // w = 0.5 x^2 + 0.25 x y - y^2, constant Hessian [[1, .25],[.25, -2]]
  Eigen::VectorXd y = Eigen::VectorXd::Zero(9 * m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) {
    const Vec2 p = m.nodes[n];
    y(dof_value(n, 0)) = 0.5 * p.x() * p.x() + 0.25 * p.x() * p.y() - p.y() * p.y();
    y(dof_grad(n, 0, 0)) = p.x() + 0.25 * p.y();
    y(dof_grad(n, 1, 0)) = 0.25 * p.x() - 2 * p.y();
  }
  const double h2 = 1.0 + 2 * 0.25 * 0.25 + 4.0;  // |H|^2
  double exact = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) exact += mu(e) * m.element_area(e) * h2;
  CHECK(y.dot(K * y) == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("bending matrix positive definite under clamping") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 1);  // 2x2 elements
  m = tag_boundary(std::move(m), {{BoundaryTag::dirichlet_clamped,
                                   [](const Vec2& p) { return p.x() < 1e-12; }}});
  ElementTable table(m);
  SparseMat K = assemble_bending_matrix(m, table, Eigen::VectorXd::Ones(m.num_elements()));
  auto clamped_nodes = m.nodes_with_tag(BoundaryTag::dirichlet_clamped);
  std::vector<bool> clamped(m.num_nodes(), false);
  for (int n : clamped_nodes) clamped[n] = true;

  std::vector<int> free;
  for (int n = 0; n < m.num_nodes(); ++n)
    if (!clamped[n])
      for (int k = 0; k < 9; ++k) free.push_back(9 * n + k);
  Eigen::MatrixXd Kd = Eigen::MatrixXd(K)(free, free);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("lumped inner product") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 0);
  ElementTable table(m);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.num_nodes());
  CHECK(lumped_inner_product(m, table, ones, ones) == doctest::Approx(4.0));

  Eigen::VectorXd x1(m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n) x1(n) = m.nodes[n].x();
  // vertex rule overestimates the exact integral 4/3
  CHECK(lumped_inner_product(m, table, x1, x1) == doctest::Approx(4.0));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  QuadMesh m2 = build_rectangle_mesh({-1, -1}, {1, 1}, 2);
  ElementTable t2(m2);
  Eigen::VectorXd a(m2.num_nodes()), b(m2.num_nodes());
  for (int n = 0; n < m2.num_nodes(); ++n) {
    a(n) = u(rng);
    b(n) = u(rng);
  }
  CHECK(lumped_inner_product(m2, t2, a, b) ==
        doctest::Approx(lumped_inner_product(m2, t2, b, a)).epsilon(1e-14));
}

TEST_CASE("lumped rule is exact when the product is bilinear per element") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {2, 3}, 2);
  ElementTable table(m);
  Eigen::VectorXd phi(m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n)
    phi(n) = 0.5 + 0.25 * m.nodes[n].x() - 0.125 * m.nodes[n].y();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.num_nodes());
  // integral of an affine function: area * value at centroid
  const double exact = 6.0 * (0.5 + 0.25 * 1.0 - 0.125 * 1.5);
  CHECK(lumped_inner_product(m, table, phi, ones) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("discrete laplacian") {
  ElementGeometry g{{Vec2(0, 0), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)}};
  DkqBasis basis(g);
  Poly f = [](const Vec2& p) { return p.x() * p.x() + p.y() * p.y(); };
  PolyGrad df = [](const Vec2& p) { return Vec2(2 * p.x(), 2 * p.y()); };
  auto dofs = interpolate(g, f, df);
  for (const Vec2& ref : {Vec2(0, 0), Vec2(0.5, -0.5), Vec2(-1, 1), Vec2(1, 1)})
    CHECK(basis.laplacian_h(dofs, ref) == doctest::Approx(4.0).epsilon(1e-11));

  // affine -> 0
  auto adofs = interpolate(g, [](const Vec2& p) { return 1 + p.x() - 2 * p.y(); },
                           [](const Vec2&) { return Vec2(1, -2); });
  CHECK(basis.laplacian_h(adofs, {0.2, -0.3}) == doctest::Approx(0.0).epsilon(1e-11));
}

TEST_CASE("discrete laplacian of a cubic against the Q2 reconstruction oracle") {
  DkqBasis basis(reference_square());
  Poly f = [](const Vec2& p) { return p.x() * p.x() * p.x(); };
  PolyGrad df = [](const Vec2& p) { return Vec2(3 * p.x() * p.x(), 0); };
  auto dofs = interpolate(reference_square(), f, df);

  // oracle: differentiate the 18-coefficient biquadratic interpolant built
  // by the interpolation rules directly (independent of DkqBasis internals)
  auto q2c = basis.gradient_map() * dofs;
  // first component coefficients at x-nodes {-1,0,1} for fixed y row:
  // Delta_h = d/dx (comp 0) + d/dy (comp 1); evaluate at center by finite
  // Lagrange differentiation: for nodes {-1,0,1}, d/dx at 0 = (f(1)-f(-1))/2.
  const double ddx_comp0 = 0.5 * (q2c(2 * 5) - q2c(2 * 7));      // right - left midpoints
  const double ddy_comp1 = 0.5 * (q2c(2 * 6 + 1) - q2c(2 * 4 + 1));  // top - bottom
  const double oracle = ddx_comp0 + ddy_comp1;
  CHECK(basis.laplacian_h(dofs, {0, 0}) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("element table caches congruent elements") {
  QuadMesh m = build_rectangle_mesh({-1, -1}, {1, 1}, 4);
  ElementTable table(m);
  CHECK(table.num_distinct() == 1);
  CHECK(m.num_elements() == 256);
}
