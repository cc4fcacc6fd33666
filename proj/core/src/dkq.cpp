#include "bilayer/dkq.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace bilayer {

namespace {

// Tensor-product cubic monomials x^a y^b with k = 4a + b.
inline double monomial(int k, const Vec2& p) {
  return std::pow(p.x(), k / 4) * std::pow(p.y(), k % 4);
}

inline Vec2 monomial_grad(int k, const Vec2& p) {
  const int a = k / 4, b = k % 4;
  double dx = a == 0 ? 0.0 : a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
  double dy = b == 0 ? 0.0 : b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
  return {dx, dy};
}

inline double monomial_dxy(int k, const Vec2& p) {
  const int a = k / 4, b = k % 4;
  if (a == 0 || b == 0) return 0.0;
  return a * b * std::pow(p.x(), a - 1) * std::pow(p.y(), b - 1);
}

const std::array<Vec2, 4> kRefCorners = {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)};
const std::array<Vec2, 9> kQ2Points = {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1),
                                       Vec2(0, -1),  Vec2(1, 0),  Vec2(0, 1), Vec2(-1, 0),
                                       Vec2(0, 0)};

// 1D quadratic Lagrange on {-1,0,1}.
inline double lag2(double node, double t) {
  if (node < -0.5) return 0.5 * t * (t - 1.0);
  if (node > 0.5) return 0.5 * t * (t + 1.0);
  return 1.0 - t * t;
}
inline double lag2_d(double node, double t) {
  if (node < -0.5) return t - 0.5;
  if (node > 0.5) return t + 0.5;
  return -2.0 * t;
}

inline double q2_shape(int a, const Vec2& p) {
  return lag2(kQ2Points[a].x(), p.x()) * lag2(kQ2Points[a].y(), p.y());
}
inline Vec2 q2_shape_grad(int a, const Vec2& p) {
  return {lag2_d(kQ2Points[a].x(), p.x()) * lag2(kQ2Points[a].y(), p.y()),
          lag2(kQ2Points[a].x(), p.x()) * lag2_d(kQ2Points[a].y(), p.y())};
}

struct GaussRule {
  std::vector<double> pts, wts;
};

const GaussRule& gauss3() {
  static const GaussRule r = {{-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)},
                              {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  return r;
}

const GaussRule& gauss4() {
  static const GaussRule r = [] {
    GaussRule g;
    const double a = std::sqrt((3.0 - 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
    const double b = std::sqrt((3.0 + 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    g.pts = {-b, -a, a, b};
    g.wts = {wb, wa, wa, wb};
    return g;
  }();
  return r;
}

}  // namespace

const std::array<Vec2, 4>& DkqBasis::reference_corners() { return kRefCorners; }
const std::array<Vec2, 9>& DkqBasis::quadratic_points() { return kQ2Points; }

Vec2 ElementGeometry::map(const Vec2& r) const {
  const double x = r.x(), y = r.y();
  return 0.25 * ((1 - x) * (1 - y) * corners[0] + (1 + x) * (1 - y) * corners[1] +
                 (1 + x) * (1 + y) * corners[2] + (1 - x) * (1 + y) * corners[3]);
}

Eigen::Matrix2d ElementGeometry::jacobian(const Vec2& r) const {
  const double x = r.x(), y = r.y();
  Vec2 dx = 0.25 * (-(1 - y) * corners[0] + (1 - y) * corners[1] + (1 + y) * corners[2] -
                    (1 + y) * corners[3]);
  Vec2 dy = 0.25 * (-(1 - x) * corners[0] - (1 + x) * corners[1] + (1 + x) * corners[2] +
                    (1 - x) * corners[3]);
  Eigen::Matrix2d J;
  J.col(0) = dx;
  J.col(1) = dy;
  return J;
}

double ElementGeometry::area() const {
  double a = 0.0;
  const GaussRule& g = gauss3();
  for (size_t i = 0; i < g.pts.size(); ++i)
    for (size_t j = 0; j < g.pts.size(); ++j)
      a += g.wts[i] * g.wts[j] * jacobian({g.pts[i], g.pts[j]}).determinant();
  return a;
}

DkqBasis::DkqBasis(const ElementGeometry& geometry) : geom_(geometry) {
  area_ = geom_.area();
  if (!(area_ > 0.0)) throw std::runtime_error("element with non-positive area");

  // Duality rows: value and physical gradient at the corners.
  Eigen::Matrix<double, 17, 16> C = Eigen::Matrix<double, 17, 16>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Vec2& v = kRefCorners[i];
    Eigen::Matrix2d JinvT = geom_.jacobian(v).inverse().transpose();
    for (int k = 0; k < 16; ++k) {
      C(3 * i, k) = monomial(k, v);
      Vec2 g = JinvT * monomial_grad(k, v);
      C(3 * i + 1, k) = g.x();
      C(3 * i + 2, k) = g.y();
    }
  }
  // Edge rows: normal derivative at the midpoint equals the endpoint average.
  for (int e = 0; e < 4; ++e) {
    const int i0 = e, i1 = (e + 1) % 4;
    const Vec2 zm = 0.5 * (kRefCorners[i0] + kRefCorners[i1]);
    Vec2 t = geom_.corners[i1] - geom_.corners[i0];
    Vec2 n(t.y(), -t.x());
    n.normalize();
    Vec2 dm = geom_.jacobian(zm).inverse() * n;
    Vec2 d0 = geom_.jacobian(kRefCorners[i0]).inverse() * n;
    Vec2 d1 = geom_.jacobian(kRefCorners[i1]).inverse() * n;
    for (int k = 0; k < 16; ++k) {
      C(12 + e, k) = dm.dot(monomial_grad(k, zm)) -
                     0.5 * (d0.dot(monomial_grad(k, kRefCorners[i0])) +
                            d1.dot(monomial_grad(k, kRefCorners[i1])));
    }
  }
  // Twist gauge row: mean corner cross derivative (reference coordinates).
  for (int k = 0; k < 16; ++k) {
    double a = 0.0;
    for (const Vec2& v : kRefCorners) a += monomial_dxy(k, v);
    C(16, k) = 0.25 * a;
  }

  Eigen::Matrix<double, 17, 12> rhs = Eigen::Matrix<double, 17, 12>::Zero();
  rhs.block<12, 12>(0, 0).setIdentity();
  // Bilinear twist estimate of the corner values, sign pattern + - + -.
  rhs(16, 0) = 0.25;
  rhs(16, 3) = -0.25;
  rhs(16, 6) = 0.25;
  rhs(16, 9) = -0.25;

  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 17, 16>> qr(C);
  qr.setThreshold(1e-9);
  if (qr.rank() < 16)
    throw std::runtime_error("DKQ construction system is rank deficient");
  coeff_ = qr.solve(rhs);
  if ((C * coeff_ - rhs).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("DKQ construction system is inconsistent");

  // Discrete gradient map.
  grad_map_.setZero();
  for (int a = 0; a < 4; ++a) {
    grad_map_(2 * a, 3 * a + 1) = 1.0;
    grad_map_(2 * a + 1, 3 * a + 2) = 1.0;
  }
  for (int e = 0; e < 4; ++e) {
    const int a = 4 + e;
    const Vec2& z = kQ2Points[a];
    Eigen::Matrix2d JinvT = geom_.jacobian(z).inverse().transpose();
    for (int j = 0; j < 12; ++j) {
      Vec2 g = Vec2::Zero();
      for (int k = 0; k < 16; ++k) g += coeff_(k, j) * monomial_grad(k, z);
      g = JinvT * g;
      grad_map_(2 * a, j) = g.x();
      grad_map_(2 * a + 1, j) = g.y();
    }
  }
  for (int i = 0; i < 2; ++i)
    grad_map_.row(16 + i) =
        0.25 * (grad_map_.row(0 + i) + grad_map_.row(2 + i) + grad_map_.row(4 + i) +
                grad_map_.row(6 + i));

  // Element bending matrix, 3x3 Gauss on the biquadratic reconstruction.
  bending_.setZero();
  const GaussRule& g3 = gauss3();
  for (size_t qi = 0; qi < g3.pts.size(); ++qi) {
    for (size_t qj = 0; qj < g3.pts.size(); ++qj) {
      const Vec2 q(g3.pts[qi], g3.pts[qj]);
      Eigen::Matrix2d J = geom_.jacobian(q);
      Eigen::Matrix2d JinvT = J.inverse().transpose();
      const double w = g3.wts[qi] * g3.wts[qj] * J.determinant();
      Eigen::Matrix<double, 4, 12> B = Eigen::Matrix<double, 4, 12>::Zero();
      for (int a = 0; a < 9; ++a) {
        Vec2 gn = JinvT * q2_shape_grad(a, q);
        for (int comp = 0; comp < 2; ++comp)
          for (int dir = 0; dir < 2; ++dir)
            B.row(2 * comp + dir) += gn(dir) * grad_map_.row(2 * a + comp);
      }
      bending_ += w * B.transpose() * B;
    }
  }

  // L2 mass of the reduced cubics, 4x4 Gauss.
  mass_.setZero();
  const GaussRule& g4 = gauss4();
  for (size_t qi = 0; qi < g4.pts.size(); ++qi) {
    for (size_t qj = 0; qj < g4.pts.size(); ++qj) {
      const Vec2 q(g4.pts[qi], g4.pts[qj]);
      const double w = g4.wts[qi] * g4.wts[qj] * geom_.jacobian(q).determinant();
      Eigen::Matrix<double, 12, 1> phi;
      for (int j = 0; j < 12; ++j) phi(j) = value(j, q);
      mass_ += w * phi * phi.transpose();
    }
  }

  for (int c = 0; c < 4; ++c) {
    const Vec2& v = kRefCorners[c];
    Eigen::Matrix2d JinvT = geom_.jacobian(v).inverse().transpose();
    Eigen::Matrix<double, 1, 12> lap = Eigen::Matrix<double, 1, 12>::Zero();
    for (int a = 0; a < 9; ++a) {
      Vec2 gn = JinvT * q2_shape_grad(a, v);
      for (int comp = 0; comp < 2; ++comp) lap += gn(comp) * grad_map_.row(2 * a + comp);
    }
    lap_corners_.row(c) = lap;
  }
}

double DkqBasis::value(int shape, const Vec2& ref) const {
  double s = 0.0;
  for (int k = 0; k < 16; ++k) s += coeff_(k, shape) * monomial(k, ref);
  return s;
}

Vec2 DkqBasis::physical_gradient(int shape, const Vec2& ref) const {
  Vec2 g = Vec2::Zero();
  for (int k = 0; k < 16; ++k) g += coeff_(k, shape) * monomial_grad(k, ref);
  return geom_.jacobian(ref).inverse().transpose() * g;
}

double DkqBasis::evaluate(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const {
  double s = 0.0;
  for (int j = 0; j < 12; ++j) s += dofs(j) * value(j, ref);
  return s;
}

Vec2 DkqBasis::gradient_h(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const {
  Eigen::Matrix<double, 18, 1> c = grad_map_ * dofs;
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 9; ++a) {
    const double N = q2_shape(a, ref);
    g.x() += N * c(2 * a);
    g.y() += N * c(2 * a + 1);
  }
  return g;
}

Eigen::Matrix2d DkqBasis::hessian_h(const Eigen::Matrix<double, 12, 1>& dofs,
                                    const Vec2& ref) const {
  Eigen::Matrix<double, 18, 1> c = grad_map_ * dofs;
  Eigen::Matrix2d JinvT = geom_.jacobian(ref).inverse().transpose();
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 9; ++a) {
    Vec2 gn = JinvT * q2_shape_grad(a, ref);
    for (int comp = 0; comp < 2; ++comp)
      for (int dir = 0; dir < 2; ++dir) H(comp, dir) += c(2 * a + comp) * gn(dir);
  }
  return H;
}

double DkqBasis::laplacian_h(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const {
  return hessian_h(dofs, ref).trace();
}

ElementTable::ElementTable(const QuadMesh& mesh) {
  per_element_.resize(mesh.num_elements(), nullptr);
  const double scale = std::max(1e-30, mesh.max_element_extent());
  std::map<std::array<long long, 6>, const DkqBasis*> cache;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    auto c = mesh.element_corners(e);
    std::array<long long, 6> key{};
    for (int i = 0; i < 3; ++i) {
      Vec2 d = c[i + 1] - c[0];
      key[2 * i] = llround(d.x() / scale * 1e12);
      key[2 * i + 1] = llround(d.y() / scale * 1e12);
    }
    auto it = cache.find(key);
    if (it == cache.end()) {
      ElementGeometry g{c};
      store_.push_back(std::make_unique<DkqBasis>(g));
      it = cache.emplace(key, store_.back().get()).first;
    }
    per_element_[e] = it->second;
  }
}

}  // namespace bilayer
