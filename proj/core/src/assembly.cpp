#include "bilayer/assembly.hpp"

#include <stdexcept>

namespace bilayer {

namespace {

// Scatters a 12x12 scalar element matrix into the three component blocks.
void scatter_blocked(const QuadMesh& mesh, int e, const Eigen::Matrix<double, 12, 12>& ke,
                     std::vector<Eigen::Triplet<double>>& trips) {
  const auto& el = mesh.elements[e];
  std::array<int, 12> base{};
  for (int ln = 0; ln < 4; ++ln)
    for (int k = 0; k < 3; ++k) base[3 * ln + k] = 3 * ln + k;
  for (int comp = 0; comp < 3; ++comp) {
    std::array<int, 12> gdof{};
    for (int ln = 0; ln < 4; ++ln)
      for (int k = 0; k < 3; ++k)
        gdof[3 * ln + k] = scalar_global_dof(el[ln], k, comp);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        if (ke(i, j) != 0.0) trips.emplace_back(gdof[i], gdof[j], ke(i, j));
  }
}

}  // namespace

SparseMat assemble_bending_matrix(const QuadMesh& mesh, const ElementTable& table,
                                  const Eigen::VectorXd& mu_per_element) {
  if (mu_per_element.size() != mesh.num_elements())
    throw std::invalid_argument("mu_per_element size mismatch");
  if (mu_per_element.minCoeff() <= 0.0)
    throw std::invalid_argument("non-positive bending coefficient");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_elements()) * 3 * 144);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Eigen::Matrix<double, 12, 12> ke = mu_per_element(e) * table.basis(e).bending();
    scatter_blocked(mesh, e, ke, trips);
  }
  SparseMat K(kDofsPerNode * mesh.num_nodes(), kDofsPerNode * mesh.num_nodes());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

SparseMat assemble_dkq_mass(const QuadMesh& mesh, const ElementTable& table) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.num_elements()) * 3 * 144);
  for (int e = 0; e < mesh.num_elements(); ++e)
    scatter_blocked(mesh, e, table.basis(e).mass(), trips);
  SparseMat M(kDofsPerNode * mesh.num_nodes(), kDofsPerNode * mesh.num_nodes());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

Eigen::VectorXd lumped_mass_diagonal(const QuadMesh& mesh, const ElementTable& table) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(kDofsPerNode * mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double w = table.basis(e).lump_weight();
    for (int c = 0; c < 4; ++c)
      for (int comp = 0; comp < 3; ++comp) d(dof_value(mesh.elements[e][c], comp)) += w;
  }
  return d;
}

double lumped_inner_product(const QuadMesh& mesh, const ElementTable& table,
                            const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) {
  return lumped_inner_product(
      mesh, table, [&phi](int, int, int n) { return phi(n); },
      [&psi](int, int, int n) { return psi(n); });
}

Vec3 deformed_normal(const Eigen::VectorXd& y, int node) {
  Vec3 g1(y(dof_grad(node, 0, 0)), y(dof_grad(node, 0, 1)), y(dof_grad(node, 0, 2)));
  Vec3 g2(y(dof_grad(node, 1, 0)), y(dof_grad(node, 1, 1)), y(dof_grad(node, 1, 2)));
  return g1.cross(g2);
}

Eigen::VectorXd assemble_coupling_vector(const QuadMesh& mesh, const ElementTable& table,
                                         const Eigen::VectorXd& mu_per_element,
                                         const Eigen::VectorXd& alpha_per_element,
                                         const Eigen::VectorXd& theta,
                                         const Eigen::VectorXd& y) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kDofsPerNode * mesh.num_nodes());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const DkqBasis& basis = table.basis(e);
    const double w = basis.lump_weight();
    const double mu_alpha = mu_per_element(e) * alpha_per_element(e);
    if (mu_alpha == 0.0) continue;
    for (int c = 0; c < 4; ++c) {
      const int n = el[c];
      const Vec3 nu = deformed_normal(y, n);
      const double factor = w * mu_alpha * theta(n);
      if (factor == 0.0) continue;
      for (int j = 0; j < 12; ++j) {
        const double lap = basis.laplacian_at_corners()(c, j);
        if (lap == 0.0) continue;
        const int ln = j / 3, kind = j % 3;
        for (int comp = 0; comp < 3; ++comp)
          f(scalar_global_dof(el[ln], kind, comp)) += factor * lap * nu(comp);
      }
    }
  }
  return f;
}

}  // namespace bilayer
