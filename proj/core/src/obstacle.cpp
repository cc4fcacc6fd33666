#include "bilayer/obstacle.hpp"

#include <stdexcept>

#include "bilayer/dkq.hpp"

namespace bilayer {

Obstacle Obstacle::halfspace(double height) {
  Obstacle o;
  o.kind = Kind::halfspace;
  o.height = height;
  return o;
}

Obstacle Obstacle::sphere_union(std::vector<Vec3> centers, double radius) {
  if (centers.empty()) throw std::invalid_argument("sphere union must be nonempty");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  Obstacle o;
  o.kind = Kind::spheres;
  o.centers = std::move(centers);
  o.radius = radius;
  return o;
}

Vec3 project_point(const Obstacle& K, const Vec3& p) {
  switch (K.kind) {
    case Obstacle::Kind::none: return p;
    case Obstacle::Kind::halfspace: return {p.x(), p.y(), std::min(p.z(), K.height)};
    case Obstacle::Kind::spheres: {
      // nearest sphere surface among the violated spheres
      int best = -1;
      double best_depth = 0.0;
      for (int i = 0; i < static_cast<int>(K.centers.size()); ++i) {
        const double depth = K.radius - (p - K.centers[i]).norm();
        if (depth > 0.0 && (best < 0 || depth < best_depth)) {
          best = i;
          best_depth = depth;
        }
      }
      if (best < 0) return p;
      Vec3 d = p - K.centers[best];
      const double len = d.norm();
      if (len < 1e-14) d = Vec3(0, 0, 1);  // center hit: deterministic direction
      else d /= len;
      return K.centers[best] + K.radius * d;
    }
  }
  return p;
}

double penetration_depth(const Obstacle& K, const Vec3& p) {
  switch (K.kind) {
    case Obstacle::Kind::none: return 0.0;
    case Obstacle::Kind::halfspace: return std::max(0.0, p.z() - K.height);
    case Obstacle::Kind::spheres: {
      double depth = 0.0;
      for (const Vec3& c : K.centers)
        depth = std::max(depth, K.radius - (p - c).norm());
      return std::max(0.0, depth);
    }
  }
  return 0.0;
}

Eigen::VectorXd project_obstacle(const Eigen::VectorXd& y, int num_nodes,
                                 const Obstacle& K) {
  Eigen::VectorXd s(3 * num_nodes);
  for (int n = 0; n < num_nodes; ++n) {
    Vec3 p(y(dof_value(n, 0)), y(dof_value(n, 1)), y(dof_value(n, 2)));
    s.segment<3>(3 * n) = project_point(K, p);
  }
  return s;
}

double max_penetration(const Eigen::VectorXd& y, int num_nodes, const Obstacle& K) {
  double depth = 0.0;
  for (int n = 0; n < num_nodes; ++n) {
    Vec3 p(y(dof_value(n, 0)), y(dof_value(n, 1)), y(dof_value(n, 2)));
    depth = std::max(depth, penetration_depth(K, p));
  }
  return depth;
}

}  // namespace bilayer
