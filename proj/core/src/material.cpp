#include "bilayer/material.hpp"

#include <stdexcept>

namespace bilayer {

void MaterialField::validate() const {
  if (regions.empty()) throw std::invalid_argument("material field has no regions");
  for (const auto& [name, m] : regions) {
    if (!(m.mu_bar > 0.0))
      throw std::invalid_argument("region '" + name + "': mu_bar must be positive");
    if (!(m.diffusivity > 0.0))
      throw std::invalid_argument("region '" + name + "': diffusivity must be positive");
  }
  if (robin_velocity < 0.0) throw std::invalid_argument("robin velocity must be >= 0");
}

EffectiveParameters effective_parameters(const RawLayerData& raw) {
  if (!(raw.delta > 0.0)) throw std::invalid_argument("thickness delta must be positive");
  if (!(2.0 * raw.mu + raw.lambda > 0.0))
    throw std::invalid_argument("2 mu + lambda must be positive");
  if (!(raw.sigma > 0.0)) throw std::invalid_argument("heat capacity must be positive");
  if (!(raw.kappa > 0.0)) throw std::invalid_argument("conductivity must be positive");

  EffectiveParameters p{};
  p.alpha_bar = 3.0 * raw.alpha / raw.delta;
  p.mu_bar = raw.mu + raw.lambda * raw.mu / (2.0 * raw.mu + raw.lambda);
  // kappa in W/(m degC), sigma in J/(m^3 degC): ratio in m^2/s -> mm^2/s
  p.diffusivity = raw.kappa / raw.sigma * 1e6;
  // eta in W/(mm^2 degC), sigma in J/(m^3 degC) = 1e-9 J/(mm^3 degC)
  p.robin_velocity = raw.eta / (raw.sigma * 1e-9);
  return p;
}

}  // namespace bilayer
