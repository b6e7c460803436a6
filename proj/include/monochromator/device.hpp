#pragma once

// Three-bounce paths through two parallel gratings: enumeration of internal
// orders, per-path geometry ratio d/s, feasibility band for l/s and the
// transmission product.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "monochromator/diffraction.hpp"

namespace monochromator {

class DeviceGeometry {
 public:
  DeviceGeometry(double separation, double length) : separation_(separation), length_(length) {
    if (!(separation > 0.0) || !(length > 0.0)) {
      throw ConfigError("device separation and length must be positive");
    }
  }

  double separation() const noexcept { return separation_; }
  double length() const noexcept { return length_; }
  double length_ratio() const noexcept { return length_ / separation_; }

  friend bool operator==(const DeviceGeometry&, const DeviceGeometry&) = default;

 private:
  double separation_;  // s, m
  double length_;      // l, m
};

struct DiffractionPath {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int total_order = 0;  // n1 + n2 + n3
  double geometry_ratio = 0.0;  // d/s = tan(alpha1) + tan(alpha2)
  // Unset when some |n_i| exceeds the grating's characterised orders.
  std::optional<double> transmission;
};

// Distance between first and third reflection.
inline double span_for(const DiffractionPath& path, const DeviceGeometry& device) {
  return device.separation() * path.geometry_ratio;
}

struct FeasibilityBand {
  double lower = 0.0;  // three reflections happen inside the device
  double upper = 0.0;  // the exit ray clears the opposite plate

  double width() const noexcept { return upper - lower; }
  bool contains(double length_ratio) const noexcept {
    return lower < length_ratio && length_ratio < upper;
  }
};

inline double path_transmission(const DiffractionPath& path, const Grating& grating) {
  return grating.probability(path.n1) * grating.probability(path.n2) *
         grating.probability(path.n3);
}

inline FeasibilityBand feasibility_band(const DiffractionPath& path,
                                        const MonochromatorSetting& setting) {
  return {path.geometry_ratio, path.geometry_ratio + std::tan(setting.theta_out())};
}

inline constexpr double exit_angle_tolerance = 1e-9;  // rad
inline constexpr double grouping_tolerance = 1e-9;    // relative

// Number of (n1, n2) combinations enumerate_paths() considers.
inline int considered_combinations(const Grating& grating) {
  const int side = 2 * grating.max_order() + 1;
  return side * side;
}

// Every (n1, n2) in [-max_order, max_order]^2 whose internal and exit angles
// all propagate; n3 closes the total order. An empty result is valid.
inline std::vector<DiffractionPath> enumerate_paths(const MonochromatorSetting& setting,
                                                    const Particle& particle,
                                                    const Grating& grating, double velocity,
                                                    double theta_inc) {
  const int total = setting.selected_order();
  const int max_order = grating.max_order();
  const double step = order_step(particle, grating, velocity);
  const double sin_inc = std::sin(theta_inc);

  std::vector<DiffractionPath> paths;
  for (int n1 = -max_order; n1 <= max_order; ++n1) {
    const double sin1 = sin_inc + n1 * step;
    if (!detail::propagates(sin1)) continue;
    const double alpha1 = std::asin(sin1);
    for (int n2 = -max_order; n2 <= max_order; ++n2) {
      const double sin2 = std::sin(alpha1) + n2 * step;
      if (!detail::propagates(sin2)) continue;
      const double alpha2 = std::asin(sin2);
      const int n3 = total - n1 - n2;
      const double sin3 = std::sin(alpha2) + n3 * step;
      if (!detail::propagates(sin3)) continue;
      if (std::abs(std::asin(sin3) - setting.theta_out()) > exit_angle_tolerance) continue;

      DiffractionPath path{n1, n2, n3, alpha1, alpha2, total,
                           std::tan(alpha1) + std::tan(alpha2), std::nullopt};
      if (grating.has_probability(n1) && grating.has_probability(n2) &&
          grating.has_probability(n3)) {
        path.transmission = path_transmission(path, grating);
      }
      paths.push_back(path);
    }
  }
  return paths;
}

struct PathGroup {
  double geometry_ratio = 0.0;
  std::vector<DiffractionPath> members;
};

// Groups by d/s (relative tolerance), ascending in d/s. Members keep their own
// transmission, which may differ inside a group.
inline std::vector<PathGroup> group_paths_by_geometry(std::span<const DiffractionPath> paths) {
  std::vector<DiffractionPath> sorted(paths.begin(), paths.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.geometry_ratio < b.geometry_ratio;
  });

  std::vector<PathGroup> groups;
  for (const auto& path : sorted) {
    if (!groups.empty()) {
      const double ref = groups.back().geometry_ratio;
      const double scale = std::max({1.0, std::abs(ref), std::abs(path.geometry_ratio)});
      if (std::abs(path.geometry_ratio - ref) <= grouping_tolerance * scale) {
        groups.back().members.push_back(path);
        continue;
      }
    }
    groups.push_back({path.geometry_ratio, {path}});
  }
  return groups;
}

}  // namespace monochromator
