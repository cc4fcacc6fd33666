#include "bilayer/heat.hpp"

#include <cmath>
#include <stdexcept>

namespace bilayer {

namespace {

const double kG2 = 1.0 / std::sqrt(3.0);
const double kG3[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
const double kW3[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline double q1_shape(int c, const Vec2& r) {
  static const double sx[4] = {-1, 1, 1, -1};
  static const double sy[4] = {-1, -1, 1, 1};
  return 0.25 * (1.0 + sx[c] * r.x()) * (1.0 + sy[c] * r.y());
}
inline Vec2 q1_grad(int c, const Vec2& r) {
  static const double sx[4] = {-1, 1, 1, -1};
  static const double sy[4] = {-1, -1, 1, 1};
  return {0.25 * sx[c] * (1.0 + sy[c] * r.y()), 0.25 * sy[c] * (1.0 + sx[c] * r.x())};
}

Eigen::Matrix2d q1_jacobian(const std::array<Vec2, 4>& p, const Vec2& r) {
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int c = 0; c < 4; ++c) {
    Vec2 g = q1_grad(c, r);
    J.col(0) += g.x() * p[c];
    J.col(1) += g.y() * p[c];
  }
  return J.transpose();  // J(i,j) = dx_i/dref_j
}

bool element_in_source(const QuadMesh& mesh, int e, const HeatSource& s) {
  switch (s.shape) {
    case HeatSource::Shape::everywhere: return true;
    case HeatSource::Shape::region: return mesh.region_tags[e] == s.region_id;
    case HeatSource::Shape::circle:
      return (mesh.element_centroid(e) - s.center).norm() <= s.radius;
  }
  return false;
}

}  // namespace

HeatSystem assemble_heat_system(const QuadMesh& mesh,
                                const Eigen::VectorXd& diffusivity_per_element,
                                const Eigen::VectorXd& robin_velocity_per_edge,
                                const std::vector<HeatSource>& sources) {
  if (diffusivity_per_element.size() != mesh.num_elements())
    throw std::invalid_argument("diffusivity size mismatch");
  if (diffusivity_per_element.minCoeff() <= 0.0)
    throw std::invalid_argument("non-positive diffusivity");
  if (robin_velocity_per_edge.size() != mesh.num_edges())
    throw std::invalid_argument("robin velocity size mismatch");

  HeatSystem sys;
  sys.num_nodes = mesh.num_nodes();
  std::vector<Eigen::Triplet<double>> tm, tk, tr;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto p = mesh.element_corners(e);
    const auto& el = mesh.elements[e];
    Eigen::Matrix4d me = Eigen::Matrix4d::Zero(), ke = Eigen::Matrix4d::Zero();
    for (double gx : {-kG2, kG2}) {
      for (double gy : {-kG2, kG2}) {
        const Vec2 r(gx, gy);
        Eigen::Matrix2d J = q1_jacobian(p, r);
        Eigen::Matrix2d JinvT = J.inverse().transpose();
        const double w = J.determinant();
        Eigen::Vector4d n;
        Eigen::Matrix<double, 2, 4> g;
        for (int c = 0; c < 4; ++c) {
          n(c) = q1_shape(c, r);
          g.col(c) = JinvT * q1_grad(c, r);
        }
        me += w * n * n.transpose();
        ke += w * diffusivity_per_element(e) * g.transpose() * g;
      }
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        tm.emplace_back(el[i], el[j], me(i, j));
        tk.emplace_back(el[i], el[j], ke(i, j));
      }
  }

  sys.robin_load_unit = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int i = 0; i < mesh.num_edges(); ++i) {
    const MeshEdge& edge = mesh.edges[i];
    if (!edge.boundary()) continue;
    if (mesh.boundary_tags[i] == BoundaryTag::robin) {
      const double v = robin_velocity_per_edge(i);
      const double L = (mesh.nodes[edge.b] - mesh.nodes[edge.a]).norm();
      // exact edge integrals of products of linears
      tr.emplace_back(edge.a, edge.a, v * L / 3.0);
      tr.emplace_back(edge.b, edge.b, v * L / 3.0);
      tr.emplace_back(edge.a, edge.b, v * L / 6.0);
      tr.emplace_back(edge.b, edge.a, v * L / 6.0);
      sys.robin_load_unit(edge.a) += v * L / 2.0;
      sys.robin_load_unit(edge.b) += v * L / 2.0;
    } else if (mesh.boundary_tags[i] == BoundaryTag::dirichlet_clamped) {
      sys.dirichlet_nodes.push_back(edge.a);
      sys.dirichlet_nodes.push_back(edge.b);
    }
  }
  std::sort(sys.dirichlet_nodes.begin(), sys.dirichlet_nodes.end());
  sys.dirichlet_nodes.erase(
      std::unique(sys.dirichlet_nodes.begin(), sys.dirichlet_nodes.end()),
      sys.dirichlet_nodes.end());

  sys.M.resize(mesh.num_nodes(), mesh.num_nodes());
  sys.K.resize(mesh.num_nodes(), mesh.num_nodes());
  sys.R.resize(mesh.num_nodes(), mesh.num_nodes());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.K.setFromTriplets(tk.begin(), tk.end());
  sys.R.setFromTriplets(tr.begin(), tr.end());

  for (const HeatSource& s : sources) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_nodes());
    for (int e = 0; e < mesh.num_elements(); ++e) {
      if (!element_in_source(mesh, e, s)) continue;
      const double w = 0.25 * mesh.element_area(e);
      for (int c = 0; c < 4; ++c) load(mesh.elements[e][c]) += w;
    }
    sys.source_loads.push_back(std::move(load));
  }
  return sys;
}

HeatStepper::HeatStepper(const HeatSystem& system, double tau) : sys_(&system), tau_(tau) {
  if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
  const int n = system.num_nodes;
  std::vector<bool> is_dirichlet(n, false);
  for (int d : system.dirichlet_nodes) is_dirichlet[d] = true;
  node_to_free_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!is_dirichlet[i]) {
      node_to_free_[i] = static_cast<int>(free_.size());
      free_.push_back(i);
    }
  }
  M_over_tau_ = system.M / tau;
  SparseMat A = M_over_tau_ + system.K + system.R;

  std::vector<Eigen::Triplet<double>> tff, tfd;
  for (int col = 0; col < A.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(A, col); it; ++it) {
      const int i = static_cast<int>(it.row()), j = col;
      if (node_to_free_[i] < 0) continue;
      if (node_to_free_[j] >= 0)
        tff.emplace_back(node_to_free_[i], node_to_free_[j], it.value());
      else
        tfd.emplace_back(node_to_free_[i], j, it.value());
    }
  }
  A_ff_.resize(free_.size(), free_.size());
  A_ff_.setFromTriplets(tff.begin(), tff.end());
  A_fd_.resize(free_.size(), n);
  A_fd_.setFromTriplets(tfd.begin(), tfd.end());
  solver_.compute(A_ff_);
  if (solver_.info() != Eigen::Success)
    throw std::runtime_error("heat system factorization failed");
}

TempField HeatStepper::step_general(const TempField& prev, const Eigen::VectorXd& extra_load,
                                    const Eigen::VectorXd& dirichlet_values) const {
  const int n = sys_->num_nodes;
  Eigen::VectorXd b = M_over_tau_ * prev + extra_load;

  TempField next = Eigen::VectorXd::Zero(n);
  for (int d : sys_->dirichlet_nodes) next(d) = dirichlet_values(d);

  Eigen::VectorXd bf(free_.size());
  for (size_t i = 0; i < free_.size(); ++i) bf(i) = b(free_[i]);
  bf -= A_fd_ * next;

  Eigen::VectorXd xf = solver_.solve(bf);
  if (solver_.info() != Eigen::Success)
    throw std::runtime_error("heat linear solve failed, residual unavailable");
  const double res = (A_ff_ * xf - bf).cwiseAbs().maxCoeff();
  if (!(res < 1e-8 * (1.0 + bf.cwiseAbs().maxCoeff())))
    throw std::runtime_error("heat linear solve failed, residual " + std::to_string(res));
  for (size_t i = 0; i < free_.size(); ++i) next(free_[i]) = xf(i);
  return next;
}

TempField HeatStepper::step(const TempField& prev, const ThermalData& data) const {
  Eigen::VectorXd load = sys_->robin_load_unit * data.theta_ext;
  for (size_t s = 0; s < sys_->source_loads.size(); ++s) {
    const double r = s < data.source_rates.size() ? data.source_rates[s] : 0.0;
    if (r != 0.0) load += sys_->source_loads[s] * r;
  }
  Eigen::VectorXd dir =
      Eigen::VectorXd::Constant(sys_->num_nodes, data.theta_dirichlet);
  return step_general(prev, load, dir);
}

TempField heat_step(const HeatSystem& system, const TempField& prev, double tau,
                    const ThermalData& data) {
  return HeatStepper(system, tau).step(prev, data);
}

Eigen::VectorXd assemble_q1_load(const QuadMesh& mesh,
                                 const std::function<double(const Vec2&)>& density) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto p = mesh.element_corners(e);
    for (double gx : {-kG2, kG2}) {
      for (double gy : {-kG2, kG2}) {
        const Vec2 r(gx, gy);
        Eigen::Matrix2d J = q1_jacobian(p, r);
        Vec2 x = Vec2::Zero();
        for (int c = 0; c < 4; ++c) x += q1_shape(c, r) * p[c];
        const double w = J.determinant() * density(x);
        for (int c = 0; c < 4; ++c) f(mesh.elements[e][c]) += w * q1_shape(c, r);
      }
    }
  }
  return f;
}

double q1_l2_error(const QuadMesh& mesh, const TempField& theta,
                   const std::function<double(const Vec2&)>& exact) {
  double err2 = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto p = mesh.element_corners(e);
    const auto& el = mesh.elements[e];
    for (int qi = 0; qi < 3; ++qi) {
      for (int qj = 0; qj < 3; ++qj) {
        const Vec2 r(kG3[qi], kG3[qj]);
        Eigen::Matrix2d J = q1_jacobian(p, r);
        Vec2 x = Vec2::Zero();
        double th = 0.0;
        for (int c = 0; c < 4; ++c) {
          x += q1_shape(c, r) * p[c];
          th += q1_shape(c, r) * theta(el[c]);
        }
        const double d = th - exact(x);
        err2 += kW3[qi] * kW3[qj] * J.determinant() * d * d;
      }
    }
  }
  return std::sqrt(err2);
}

}  // namespace bilayer
