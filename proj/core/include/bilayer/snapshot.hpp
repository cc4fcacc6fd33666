#pragma once

#include <string>
#include <vector>

#include "bilayer/heat.hpp"
#include "bilayer/mesh.hpp"
#include "bilayer/plate.hpp"

namespace bilayer {

struct DiagnosticsRow {
  double time = 0.0;
  double energy = 0.0;        // bending energy I[y]
  double functional = 0.0;    // accepted semi-implicit functional value
  double defect = 0.0;        // max nodal isometry defect
  double penetration = 0.0;   // max obstacle violation of y
  double stationarity = 0.0;  // ||dy||_L2 + ||Dh2 dy||_L2 of the last step
  double theta_min = 0.0;
  double theta_max = 0.0;
};

struct Diagnostics {
  std::vector<DiagnosticsRow> rows;
};

// Legacy-ASCII unstructured-grid snapshot: POINTS carry the deformed nodal
// positions, CELLS the quads, POINT_DATA the arrays "temperature",
// "isometry_defect" and "gap" (|s - y| per node).  File name snap_%06d.vtk.
std::string write_snapshot(const QuadMesh& mesh, const SplitState& state,
                           const TempField& theta, int step, const std::string& dir);

// CSV with a fixed column order and 17 significant digits.
void write_diagnostics(const Diagnostics& diag, const std::string& path);

}  // namespace bilayer
