#pragma once

#include <map>
#include <string>

namespace bilayer {

// Effective coefficients of one material region in the reduced model.
// All heat coefficients are stored sigma-normalized: diffusivity kappa/sigma
// in mm^2/s, and the robin transfer velocity eta/sigma in mm/s.
struct RegionMaterial {
  double mu_bar = 0.0;       // MPa
  double alpha_bar = 0.0;    // 1/(mm degC), signed; 0 for thermally inert regions
  double diffusivity = 0.0;  // mm^2/s

  bool operator==(const RegionMaterial&) const = default;
};

struct MaterialField {
  std::map<std::string, RegionMaterial> regions;
  double robin_velocity = 0.0;  // mm/s, applied on robin-tagged edges

  void validate() const;  // mu_bar > 0, diffusivity > 0 for every region
  bool operator==(const MaterialField&) const = default;
};

// Raw single-layer data in the units the experiments quote.
struct RawLayerData {
  double alpha;  // 1/degC (magnitude; the layers carry opposite signs)
  double delta;  // plate thickness, mm
  double lambda; // MPa
  double mu;     // MPa
  double kappa;  // W/(m degC)
  double sigma;  // rho * c_v, J/(m^3 degC)
  double eta;    // W/(mm^2 degC)
};

struct EffectiveParameters {
  double alpha_bar;       // 1/(mm degC)
  double mu_bar;          // MPa
  double diffusivity;     // mm^2/s
  double robin_velocity;  // mm/s
};

// alpha_bar = 3 alpha / delta, mu_bar = mu + lambda mu / (2 mu + lambda),
// with the heat ratios converted to the mm/s unit system.
EffectiveParameters effective_parameters(const RawLayerData& raw);

}  // namespace bilayer
