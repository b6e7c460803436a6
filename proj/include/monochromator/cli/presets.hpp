#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "monochromator/diffraction.hpp"

namespace monochromator::cli {

struct MaterialPreset {
  std::string name;
  double period = 0.0;  // m
  std::vector<double> reflection_probabilities;
  std::string notes;

  Grating grating() const { return {period, reflection_probabilities}; }
};

struct ParticlePreset {
  std::string name;
  double mass = 0.0;  // kg
  std::string notes;

  Particle particle() const { return {name, mass}; }
};

inline const std::vector<MaterialPreset>& material_presets() {
  static const std::vector<MaterialPreset> presets{
      {"si111-h1x1", 3.383e-10, {0.06, 0.03, 0.015},
       "hydrogen-passivated Si(111) 1x1; populations of orders 0, 1, 2 for helium"},
  };
  return presets;
}

inline const std::vector<ParticlePreset>& particle_presets() {
  static const std::vector<ParticlePreset> presets{
      {"helium-4", PhysicalConstants::helium4_mass, "4He atom"},
      {"helium-3", 5.0082343e-27, "3He atom"},
      {"neon-20", 3.3198606e-26, "20Ne atom"},
  };
  return presets;
}

inline const MaterialPreset& find_material(std::string_view name) {
  for (const auto& p : material_presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown material preset '" + std::string(name) + "'");
}

inline const ParticlePreset& find_particle(std::string_view name) {
  for (const auto& p : particle_presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown particle preset '" + std::string(name) + "'");
}

}  // namespace monochromator::cli
