#include "bilayer/snapshot.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "bilayer/constraints.hpp"

namespace bilayer {

namespace {

class File {
 public:
  File(const std::string& path, const char* mode) : f_(std::fopen(path.c_str(), mode)) {
    if (!f_) throw std::runtime_error("cannot open " + path + " for writing");
  }
  ~File() {
    if (f_) std::fclose(f_);
  }
  std::FILE* get() { return f_; }

 private:
  std::FILE* f_;
};

}  // namespace

std::string write_snapshot(const QuadMesh& mesh, const SplitState& state,
                           const TempField& theta, int step, const std::string& dir) {
  std::filesystem::create_directories(dir);
  char name[32];
  std::snprintf(name, sizeof(name), "snap_%06d.vtk", step);
  const std::string path = dir + "/" + name;
  File f(path, "w");

  std::fprintf(f.get(), "# vtk DataFile Version 3.0\n");
  std::fprintf(f.get(), "bilayer plate snapshot step %d\n", step);
  std::fprintf(f.get(), "ASCII\nDATASET UNSTRUCTURED_GRID\n");
  const int nn = mesh.num_nodes(), ne = mesh.num_elements();
  std::fprintf(f.get(), "POINTS %d double\n", nn);
  for (int n = 0; n < nn; ++n)
    std::fprintf(f.get(), "%.17g %.17g %.17g\n", state.y(dof_value(n, 0)),
                 state.y(dof_value(n, 1)), state.y(dof_value(n, 2)));
  std::fprintf(f.get(), "CELLS %d %d\n", ne, 5 * ne);
  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.elements[e];
    std::fprintf(f.get(), "4 %d %d %d %d\n", el[0], el[1], el[2], el[3]);
  }
  std::fprintf(f.get(), "CELL_TYPES %d\n", ne);
  for (int e = 0; e < ne; ++e) std::fprintf(f.get(), "9\n");

  std::fprintf(f.get(), "POINT_DATA %d\n", nn);
  std::fprintf(f.get(), "SCALARS temperature double 1\nLOOKUP_TABLE default\n");
  for (int n = 0; n < nn; ++n) std::fprintf(f.get(), "%.17g\n", theta(n));
  std::fprintf(f.get(), "SCALARS isometry_defect double 1\nLOOKUP_TABLE default\n");
  for (int n = 0; n < nn; ++n) {
    Eigen::Matrix<double, 3, 2> G = nodal_deformation_gradient(state.y, n);
    Eigen::Matrix2d r = G.transpose() * G - Eigen::Matrix2d::Identity();
    std::fprintf(f.get(), "%.17g\n", r.norm());
  }
  std::fprintf(f.get(), "SCALARS gap double 1\nLOOKUP_TABLE default\n");
  for (int n = 0; n < nn; ++n) {
    Vec3 y(state.y(dof_value(n, 0)), state.y(dof_value(n, 1)), state.y(dof_value(n, 2)));
    Vec3 s = state.s.segment<3>(3 * n);
    std::fprintf(f.get(), "%.17g\n", (y - s).norm());
  }
  return path;
}

void write_diagnostics(const Diagnostics& diag, const std::string& path) {
  File f(path, "w");
  std::fprintf(f.get(),
               "time,energy,functional,defect,penetration,stationarity,theta_min,theta_max\n");
  for (const DiagnosticsRow& r : diag.rows)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.time,
                 r.energy, r.functional, r.defect, r.penetration, r.stationarity,
                 r.theta_min, r.theta_max);
}

}  // namespace bilayer
