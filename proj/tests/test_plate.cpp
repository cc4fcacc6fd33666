#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "bilayer/constraints.hpp"
#include "bilayer/mesh.hpp"
#include "bilayer/obstacle.hpp"
#include "bilayer/plate.hpp"

using namespace bilayer;

namespace {

PlateField cylinder_state(const QuadMesh& mesh, double kappa) {
  PlateField y = Eigen::VectorXd::Zero(kDofsPerNode * mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const double x = mesh.nodes[n].x(), t = mesh.nodes[n].y();
    y(dof_value(n, 0)) = std::sin(kappa * x) / kappa;
    y(dof_value(n, 1)) = t;
    y(dof_value(n, 2)) = (1.0 - std::cos(kappa * x)) / kappa;
    y(dof_grad(n, 0, 0)) = std::cos(kappa * x);
    y(dof_grad(n, 0, 2)) = std::sin(kappa * x);
    y(dof_grad(n, 1, 1)) = 1.0;
  }
  return y;
}

PlateField rotate_state(const PlateField& y, int num_nodes, const Eigen::Matrix3d& Q) {
  PlateField out = y;
  for (int n = 0; n < num_nodes; ++n) {
    Vec3 v(y(dof_value(n, 0)), y(dof_value(n, 1)), y(dof_value(n, 2)));
    v = Q * v;
    for (int c = 0; c < 3; ++c) out(dof_value(n, c)) = v(c);
    for (int d = 0; d < 2; ++d) {
      Vec3 g(y(dof_grad(n, d, 0)), y(dof_grad(n, d, 1)), y(dof_grad(n, d, 2)));
      g = Q * g;
      for (int c = 0; c < 3; ++c) out(dof_grad(n, d, c)) = g(c);
    }
  }
  return out;
}

std::vector<bool> clamp_left_edge(const QuadMesh& mesh, double x0) {
  std::vector<bool> clamped(mesh.num_nodes(), false);
  for (int n = 0; n < mesh.num_nodes(); ++n)
    if (mesh.nodes[n].x() < x0 + 1e-12) clamped[n] = true;
  return clamped;
}

}  // namespace

TEST_CASE("flat state constraint block is canonical") {
  Eigen::Matrix<double, 3, 2> G;
  G << 1, 0, 0, 1, 0, 0;
  NodalConstraintBlock blk = build_constraint_block(G);
  Eigen::Matrix<double, 6, 1> a;
  a << 1, 0, 0, 0, 0, 0;  // d1 v1
  CHECK((blk.B * a)(0) == doctest::Approx(2.0));
  a << 0, 0, 0, 0, 1, 0;  // d2 v2
  CHECK((blk.B * a)(1) == doctest::Approx(2.0));
  a << 0, 1, 0, 1, 0, 0;  // d1 v2 + d2 v1
  CHECK((blk.B * a)(2) == doctest::Approx(2.0));
  CHECK(blk.rank == 3);
  CHECK((blk.B * blk.kernel).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kernel vectors satisfy the symmetric residual identically") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix<double, 3, 2> G;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) G(i, j) = u(rng);
    if ((G.col(0).cross(G.col(1))).norm() < 0.1) continue;
    NodalConstraintBlock blk = build_constraint_block(G);
    CHECK(blk.rank == 3);
    for (int k = 0; k < 3; ++k) {
      Eigen::Matrix<double, 6, 1> a = blk.kernel.col(k);
      Eigen::Matrix<double, 3, 2> dv;
      dv.col(0) = a.head<3>();
      dv.col(1) = a.tail<3>();
      Eigen::Matrix2d r = dv.transpose() * G + G.transpose() * dv;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("rotated flat state conjugates the constraint block") {
  Eigen::Matrix3d Q =
      Eigen::AngleAxisd(0.83, Vec3(1, 2, -0.5).normalized()).toRotationMatrix();
  Eigen::Matrix<double, 3, 2> G_flat;
  G_flat << 1, 0, 0, 1, 0, 0;
  Eigen::Matrix<double, 3, 2> G_rot = Q * G_flat;
  NodalConstraintBlock rot = build_constraint_block(G_rot);
  CHECK(rot.rank == 3);
  // explicit small-matrix oracle: minors of the symmetric condition with Q columns
  Eigen::Matrix<double, 3, 6> expected;
  expected.setZero();
  expected.block<1, 3>(0, 0) = 2.0 * (Q * Vec3(1, 0, 0)).transpose();
  expected.block<1, 3>(1, 3) = 2.0 * (Q * Vec3(0, 1, 0)).transpose();
  expected.block<1, 3>(2, 0) = (Q * Vec3(0, 1, 0)).transpose();
  expected.block<1, 3>(2, 3) = (Q * Vec3(1, 0, 0)).transpose();
  CHECK((rot.B - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stacked constraint matrix annihilates admissible velocities") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {2, 1}, 2);
  PlateField y = cylinder_state(m, 0.8);
  std::vector<bool> clamped(m.num_nodes(), false);
  Eigen::SparseMatrix<double> B = build_constraints(m, y, clamped);
  CHECK(B.rows() == 3 * m.num_nodes());

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  PlateField v = Eigen::VectorXd::Zero(y.size());
  for (int n = 0; n < m.num_nodes(); ++n) {
    NodalConstraintBlock blk = build_constraint_block(nodal_deformation_gradient(y, n));
    Eigen::Vector3d q(u(rng), u(rng), u(rng));
    Eigen::Matrix<double, 6, 1> g = blk.kernel * q;
    for (int c = 0; c < 3; ++c) {
      v(dof_value(n, c)) = u(rng);
      v(dof_grad(n, 0, c)) = g(c);
      v(dof_grad(n, 1, c)) = g(3 + c);
    }
  }
  CHECK((B * v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("flat state with zero temperature stays put") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 2);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), 2000.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), 0.1);
  PlateOperators ops(m, mu, alpha, clamp_left_edge(m, 0.0));
  SplitState st = initial_state(m);
  TempField theta = TempField::Zero(m.num_nodes());
  PlateStepStats stats;
  SplitState next = plate_step(ops, st, theta, 0.01, 1e-4, Obstacle::none_obstacle(), &stats);
  CHECK((next.y - st.y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(stats.constraint_residual < 1e-12);
  CHECK(stats.functional_after <= stats.functional_before + 1e-12);
}

TEST_CASE("reduced solve matches a dense KKT oracle") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 0.5}, 1);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), 100.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), 0.1);
  std::vector<bool> clamped = clamp_left_edge(m, 0.0);
  PlateOperators ops(m, mu, alpha, clamped);

  PlateField y = cylinder_state(m, 1.2);
  TempField theta = TempField::Constant(m.num_nodes(), 8.0);
  const double tau = 0.01, eps = 1e-3;

  Eigen::VectorXd coupling =
      assemble_coupling_vector(m, ops.table(), mu, alpha, theta, y);
  Eigen::VectorXd rhs = coupling - ops.bending_matrix() * y;
  Eigen::VectorXd s = nodal_values(y, m.num_nodes());
  PlateStepStats stats;
  PlateField v = ops.solve_step(y, rhs, tau, eps, &stats);
  CHECK(stats.constraint_residual < 1e-12 * (1.0 + stats.velocity_max));

  // dense KKT on the free dofs with explicit multipliers
  std::vector<int> free_dofs;
  std::vector<int> free_nodes;
  for (int n = 0; n < m.num_nodes(); ++n) {
    if (clamped[n]) continue;
    free_nodes.push_back(n);
    for (int k = 0; k < 9; ++k) free_dofs.push_back(9 * n + k);
  }
  const int nv = static_cast<int>(free_dofs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::MatrixXd Kd = Eigen::MatrixXd(ops.bending_matrix())(free_dofs, free_dofs);
  A = tau * Kd;
  for (int i = 0; i < nv; ++i) {
    const int dof = free_dofs[i];
    if (dof % 9 < 3) A(i, i) += tau / eps * ops.lumped_diagonal()(dof);
  }
  Eigen::SparseMatrix<double> Bs = build_constraints(m, y, clamped);
  Eigen::MatrixXd B = Eigen::MatrixXd(Bs)(Eigen::all, free_dofs);
  const int nc = static_cast<int>(B.rows());
  Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(nv + nc, nv + nc);
  KKT.topLeftCorner(nv, nv) = A;
  KKT.topRightCorner(nv, nc) = B.transpose();
  KKT.bottomLeftCorner(nc, nv) = B;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nv + nc);
  for (int i = 0; i < nv; ++i) b(i) = rhs(free_dofs[i]);
  Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(KKT).solve(b);

  for (int i = 0; i < nv; ++i)
    CHECK(v(free_dofs[i]) == doctest::Approx(sol(i)).epsilon(1e-7).scale(1.0));
}

TEST_CASE("obstacle projections") {
  Obstacle plane = Obstacle::halfspace(0.5);
  CHECK(project_point(plane, {0, 0, 0.3}) == Vec3(0, 0, 0.3));
  CHECK(project_point(plane, {0, 0, 0.7}) == Vec3(0, 0, 0.5));
  CHECK(penetration_depth(plane, {0, 0, 0.7}) == doctest::Approx(0.2));

  Obstacle balls = Obstacle::sphere_union({Vec3(0.5, 0.5, 0.5)}, 0.24);
  Vec3 p = project_point(balls, {0.5, 0.5, 0.4});
  CHECK(p.x() == doctest::Approx(0.5));
  CHECK(p.y() == doctest::Approx(0.5));
  CHECK(p.z() == doctest::Approx(0.26));
  CHECK(project_point(balls, {0.5, 0.5, 0.1}) == Vec3(0.5, 0.5, 0.1));

  CHECK_THROWS_AS(Obstacle::sphere_union({}, 0.24), std::invalid_argument);
}

TEST_CASE("bending energy closed forms") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {2, 1}, 3);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), 2000.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), 0.1);
  PlateOperators ops(m, mu, alpha, std::vector<bool>(m.num_nodes(), false));

  PlateField flat = flat_state(m);
  TempField zero = TempField::Zero(m.num_nodes());
  CHECK(std::abs(bending_energy(ops, flat, zero)) < 1e-7);

  // flat plate at theta0: only the (alpha theta)^2 term remains
  TempField theta0 = TempField::Constant(m.num_nodes(), 30.0);
  const double expected = 2.0 * 2000.0 * std::pow(0.1 * 30.0, 2) * 2.0 / 12.0;
  CHECK(bending_energy(ops, flat, theta0) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("cylinder at the preferred curvature approaches the analytic energy") {
  // I = mu |omega| ((k - k*)^2 + k*^2) / 12 for a cylinder of curvature k
  const double kappa = 0.5, mu0 = 2000.0, alpha0 = 0.1;
  const double theta0 = kappa / alpha0;
  double prev_err = 0.0;
  for (int r : {3, 4, 5}) {
    QuadMesh m = build_rectangle_mesh({0, 0}, {2, 1}, r);
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), mu0);
    Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), alpha0);
    PlateOperators ops(m, mu, alpha, std::vector<bool>(m.num_nodes(), false));
    PlateField y = cylinder_state(m, kappa);
    TempField theta = TempField::Constant(m.num_nodes(), theta0);
    const double exact = mu0 * 2.0 * kappa * kappa / 12.0;
    const double err = std::abs(bending_energy(ops, y, theta) - exact);
    if (r > 3) CHECK(err < 0.35 * prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-3 * mu0 * kappa * kappa / 12.0);
}

TEST_CASE("isometry defect") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 1);
  PlateField y = flat_state(m);
  CHECK(isometry_defect(m, y) == 0.0);

  // scale in-plane by 2: G^T G = 4 I, defect = ||3 I||_F = 3 sqrt(2)
  for (int n = 0; n < m.num_nodes(); ++n) {
    y(dof_value(n, 0)) *= 2.0;
    y(dof_value(n, 1)) *= 2.0;
    y(dof_grad(n, 0, 0)) = 2.0;
    y(dof_grad(n, 1, 1)) = 2.0;
  }
  CHECK(isometry_defect(m, y) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("frame indifference: rotated data produces rotated iterates") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {1, 1}, 2);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), 500.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), 0.1);
  // pin one element's nodes
  std::vector<bool> clamped(m.num_nodes(), false);
  for (int c = 0; c < 4; ++c) clamped[m.elements[0][c]] = true;

  TempField theta(m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n)
    theta(n) = 20.0 + 10.0 * m.nodes[n].x() - 4.0 * m.nodes[n].y();

  Eigen::Matrix3d Q =
      Eigen::AngleAxisd(0.6, Vec3(0.3, -1, 2).normalized()).toRotationMatrix();
  Obstacle balls = Obstacle::sphere_union({Vec3(0.5, 0.5, 0.45)}, 0.2);
  std::vector<Vec3> rotated_centers = {Q * Vec3(0.5, 0.5, 0.45)};
  Obstacle balls_rot = Obstacle::sphere_union(rotated_centers, 0.2);

  const double tau = 2e-4, eps = 1e-5;
  PlateOperators ops_a(m, mu, alpha, clamped);
  SplitState a = initial_state(m);
  PlateOperators ops_b(m, mu, alpha, clamped);
  SplitState b;
  b.y = rotate_state(a.y, m.num_nodes(), Q);
  b.s = Eigen::VectorXd(3 * m.num_nodes());
  for (int n = 0; n < m.num_nodes(); ++n)
    b.s.segment<3>(3 * n) = Q * a.s.segment<3>(3 * n);

  for (int k = 0; k < 3; ++k) {
    a = plate_step(ops_a, a, theta, tau, eps, balls);
    b = plate_step(ops_b, b, theta, tau, eps, balls_rot);
  }
  PlateField a_rot = rotate_state(a.y, m.num_nodes(), Q);
  CHECK((b.y - a_rot).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + a.y.cwiseAbs().maxCoeff()));
}

TEST_CASE("per-step descent along a bending run") {
  QuadMesh m = build_rectangle_mesh({0, 0}, {2, 0.5}, 2);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(m.num_elements(), 2000.0);
  Eigen::VectorXd alpha = Eigen::VectorXd::Constant(m.num_elements(), 0.1);
  PlateOperators ops(m, mu, alpha, clamp_left_edge(m, 0.0));
  SplitState st = initial_state(m);
  TempField theta = TempField::Constant(m.num_nodes(), 3.0);
  PlateStepStats stats;
  for (int k = 0; k < 25; ++k) {
    st = plate_step(ops, st, theta, 0.01, 1e-4, Obstacle::none_obstacle(), &stats);
    CHECK(stats.functional_after <=
          stats.functional_before + 1e-10 * (1.0 + std::abs(stats.functional_before)));
    CHECK(stats.constraint_residual <= 1e-10 * (1.0 + stats.velocity_max));
  }
  CHECK(isometry_defect(m, st.y) < 0.1);
  CHECK(st.y(dof_value(m.num_nodes() - 1, 2)) > 0.01);  // bends upward

  // clamped nodes carry the flat data exactly at every step
  PlateField flat = flat_state(m);
  for (int n = 0; n < m.num_nodes(); ++n) {
    if (m.nodes[n].x() > 1e-12) continue;
    for (int k = 0; k < 9; ++k) CHECK(st.y(9 * n + k) == flat(9 * n + k));
  }
}
