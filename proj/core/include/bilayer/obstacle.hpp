#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bilayer/mesh.hpp"

namespace bilayer {

// Admissible set K for the deformation: everything, the half space
// { y3 <= height }, or the complement of a union of closed balls.
struct Obstacle {
  enum class Kind { none, halfspace, spheres };
  Kind kind = Kind::none;
  double height = 0.0;        // halfspace
  std::vector<Vec3> centers;  // spheres
  double radius = 0.0;

  static Obstacle none_obstacle() { return {}; }
  static Obstacle halfspace(double height);
  static Obstacle sphere_union(std::vector<Vec3> centers, double radius);

  bool operator==(const Obstacle& o) const {
    if (kind != o.kind || height != o.height || radius != o.radius ||
        centers.size() != o.centers.size())
      return false;
    for (size_t i = 0; i < centers.size(); ++i)
      if (!(centers[i] == o.centers[i])) return false;
    return true;
  }
};

// Nodewise projection Pi_K.  Sphere violations project to the surface of the
// nearest sphere.
Vec3 project_point(const Obstacle& K, const Vec3& p);

// Per-node projection of the value dofs of y (9N) into an s field (3N).
Eigen::VectorXd project_obstacle(const Eigen::VectorXd& y, int num_nodes,
                                 const Obstacle& K);

// Largest infeasibility of a point / of the nodal values of y; 0 if feasible.
double penetration_depth(const Obstacle& K, const Vec3& p);
double max_penetration(const Eigen::VectorXd& y, int num_nodes, const Obstacle& K);

}  // namespace bilayer
