#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "bilayer/mesh.hpp"

namespace bilayer {

// Plate degrees of freedom per node: (y1,y2,y3, d1y1,d1y2,d1y3, d2y1,d2y2,d2y3).
constexpr int kDofsPerNode = 9;

inline int dof_value(int node, int comp) { return kDofsPerNode * node + comp; }
inline int dof_grad(int node, int dir, int comp) {
  return kDofsPerNode * node + 3 + 3 * dir + comp;
}
// Scalar (per-component) local dof: 3*local_node + kind, kind in {value, d1, d2}.
inline int scalar_global_dof(int node, int kind, int comp) {
  return kind == 0 ? dof_value(node, comp) : dof_grad(node, kind - 1, comp);
}

struct ElementGeometry {
  std::array<Vec2, 4> corners;

  Vec2 map(const Vec2& ref) const;
  Eigen::Matrix2d jacobian(const Vec2& ref) const;
  double area() const;
};

// Reduced bicubic plate element: 12 dofs (value and gradient at the corners),
// local space Q3 constrained by the edge-midpoint averaging of the normal
// derivative.  The duality-plus-constraint system leaves one interior twist
// mode free; it is fixed by matching the bilinear twist estimate of the
// corner values, which restores pointwise reproduction of quadratics.
class DkqBasis {
 public:
  explicit DkqBasis(const ElementGeometry& geometry);

  const ElementGeometry& geometry() const { return geom_; }
  double area() const { return area_; }
  double lump_weight() const { return 0.25 * area_; }

  // Monomial coefficients (x^a y^b, k = 4a + b) of the 12 shape functions.
  const Eigen::Matrix<double, 16, 12>& coefficients() const { return coeff_; }

  // Discrete gradient map: 12 local dofs -> 18 biquadratic coefficients of
  // grad_h (9 interpolation points x 2 components, row 2*point + comp).
  const Eigen::Matrix<double, 18, 12>& gradient_map() const { return grad_map_; }

  // Element matrices: integral of Dh^2 wi : Dh^2 wj (coefficient-free) and
  // the L2 mass of the reduced cubics.
  const Eigen::Matrix<double, 12, 12>& bending() const { return bending_; }
  const Eigen::Matrix<double, 12, 12>& mass() const { return mass_; }

  // Delta_h of each shape function at the 4 corners.
  const Eigen::Matrix<double, 4, 12>& laplacian_at_corners() const { return lap_corners_; }

  // Pointwise evaluation in reference coordinates.
  double value(int shape, const Vec2& ref) const;
  Vec2 physical_gradient(int shape, const Vec2& ref) const;
  double evaluate(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const;
  Vec2 gradient_h(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const;
  Eigen::Matrix2d hessian_h(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const;
  double laplacian_h(const Eigen::Matrix<double, 12, 1>& dofs, const Vec2& ref) const;

  static const std::array<Vec2, 4>& reference_corners();
  static const std::array<Vec2, 9>& quadratic_points();

 private:
  ElementGeometry geom_;
  double area_ = 0.0;
  Eigen::Matrix<double, 16, 12> coeff_;
  Eigen::Matrix<double, 18, 12> grad_map_;
  Eigen::Matrix<double, 12, 12> bending_;
  Eigen::Matrix<double, 12, 12> mass_;
  Eigen::Matrix<double, 4, 12> lap_corners_;
};

// Per-element basis lookup with caching over congruent elements (tensor
// meshes have very few distinct element shapes).
class ElementTable {
 public:
  explicit ElementTable(const QuadMesh& mesh);

  const DkqBasis& basis(int element) const { return *per_element_[element]; }
  int num_distinct() const { return static_cast<int>(store_.size()); }

 private:
  std::vector<std::unique_ptr<DkqBasis>> store_;
  std::vector<const DkqBasis*> per_element_;
};

}  // namespace bilayer
