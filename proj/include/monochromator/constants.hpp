#pragma once

#include <numbers>

namespace monochromator {

// CODATA 2018 (h is exact since the 2019 SI redefinition).
struct PhysicalConstants {
  static constexpr double planck = 6.62607015e-34;  // J s
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double helium4_mass = 6.6464731e-27;  // kg
};

inline constexpr double pi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / pi; }

}  // namespace monochromator
