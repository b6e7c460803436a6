#pragma once

// Atom-surface diffraction in closed form: de Broglie wavelength, the grating
// equation, its velocity derivative, and the inverse problem of picking the
// incidence angle that sends a given velocity to a fixed exit angle.
//
// Angles are measured from the surface normal, in radians. A positive order
// increases sin(theta) (momentum transfer along the grating direction).

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "monochromator/constants.hpp"
#include "monochromator/errors.hpp"

namespace monochromator {

class Particle {
 public:
  Particle(std::string name, double mass) : name_(std::move(name)), mass_(mass) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw ConfigError("particle '" + name_ + "': mass must be positive");
    }
  }

  static Particle helium4() {
    return Particle("helium-4", PhysicalConstants::helium4_mass);
  }

  const std::string& name() const noexcept { return name_; }
  double mass() const noexcept { return mass_; }

  friend bool operator==(const Particle&, const Particle&) = default;

 private:
  std::string name_;
  double mass_;  // kg
};

// Surface grating: period a_S and reflection probability per |order|.
// probabilities[k] is the population of orders +k and -k.
class Grating {
 public:
  Grating(double period, std::vector<double> probabilities)
      : period_(period), probabilities_(std::move(probabilities)) {
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw ConfigError("grating period must be positive");
    }
    if (probabilities_.empty()) {
      throw ConfigError("grating needs at least the zeroth-order probability");
    }
    for (double p : probabilities_) {
      if (!(p > 0.0 && p <= 1.0)) {
        throw ConfigError("reflection probabilities must lie in (0, 1]");
      }
    }
  }

  double period() const noexcept { return period_; }
  int max_order() const noexcept { return static_cast<int>(probabilities_.size()) - 1; }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

  bool has_probability(int order) const noexcept { return std::abs(order) <= max_order(); }

  double probability(int order) const {
    if (!has_probability(order)) {
      throw ConfigError("no reflection probability for diffraction order " +
                        std::to_string(order));
    }
    return probabilities_[static_cast<std::size_t>(std::abs(order))];
  }

  friend bool operator==(const Grating&, const Grating&) = default;

 private:
  double period_;  // m
  std::vector<double> probabilities_;
};

// Fixed exit angle and the total order the device works on.
//
// total_order keeps the label as given; the literature labels the grazing
// working point "N = -1". Physics always uses selected_order() = |N|, the
// order that lifts sin(theta) towards the fixed exit angle.
class MonochromatorSetting {
 public:
  explicit MonochromatorSetting(double theta_out = deg_to_rad(85.0), int total_order = -1)
      : theta_out_(theta_out), total_order_(total_order) {
    if (!(theta_out > 0.0 && theta_out < pi / 2)) {
      throw ConfigError("exit angle must lie in (0, 90) degrees");
    }
  }

  double theta_out() const noexcept { return theta_out_; }
  double epsilon() const noexcept { return pi / 2 - theta_out_; }
  int total_order() const noexcept { return total_order_; }
  int selected_order() const noexcept { return std::abs(total_order_); }

  friend bool operator==(const MonochromatorSetting&, const MonochromatorSetting&) = default;

 private:
  double theta_out_;
  int total_order_;
};

inline double de_broglie_wavelength(const Particle& particle, double velocity) {
  if (!(velocity > 0.0)) {
    throw DomainError("velocity must be positive, got " + std::to_string(velocity));
  }
  return 2.0 * pi * PhysicalConstants::hbar / (particle.mass() * velocity);
}

// lambda_dB / a_S, the change of sin(theta) per unit order.
inline double order_step(const Particle& particle, const Grating& grating, double velocity) {
  return de_broglie_wavelength(particle, velocity) / grating.period();
}

// Grazing threshold below which the derivative is still meaningful.
inline constexpr double grazing_margin = 1e-12;

namespace detail {

inline bool propagates(double sine) noexcept { return std::abs(sine) <= 1.0; }

}  // namespace detail

inline double diffraction_angle(double theta_inc, int order, const Particle& particle,
                                const Grating& grating, double velocity) {
  if (!(std::abs(theta_inc) < pi / 2)) {
    throw DomainError("incidence angle must lie in (-90, 90) degrees");
  }
  if (order == 0) {
    if (!(velocity > 0.0)) throw DomainError("velocity must be positive");
    return theta_inc;
  }
  const double sine = std::sin(theta_inc) + order * order_step(particle, grating, velocity);
  if (!detail::propagates(sine)) throw EvanescentOrder(order, sine);
  return std::asin(sine);
}

// d(theta_out)/dv for the total order N at fixed incidence.
inline double velocity_divergence(double theta_inc, int order, const Particle& particle,
                                  const Grating& grating, double velocity) {
  const double step = order_step(particle, grating, velocity);
  const double sine = std::sin(theta_inc) + order * step;
  if (!detail::propagates(sine)) throw EvanescentOrder(order, sine);
  if (order == 0) return 0.0;
  if (std::abs(sine) > 1.0 - grazing_margin) {
    throw GrazingSingularity("exit is grazing, dtheta/dv diverges");
  }
  return -order * step / (velocity * std::sqrt(1.0 - sine * sine));
}

// Incidence angle that maps velocity v onto the fixed exit angle at the
// selected total order. Throws BelowCutoff if that would need theta_inc < 0.
inline double incidence_for_output(const MonochromatorSetting& setting, const Particle& particle,
                                   const Grating& grating, double velocity) {
  const int order = setting.selected_order();
  const double sine =
      std::cos(setting.epsilon()) - order * order_step(particle, grating, velocity);
  if (sine < 0.0) throw BelowCutoff(velocity, setting.total_order());
  return std::asin(sine);
}

// Lowest velocity reachable at the selected order (theta_inc = 0).
inline double cutoff_velocity(const MonochromatorSetting& setting, const Particle& particle,
                              const Grating& grating) {
  const int order = setting.selected_order();
  if (order == 0) return 0.0;
  return order * 2.0 * pi * PhysicalConstants::hbar /
         (particle.mass() * grating.period() * std::cos(setting.epsilon()));
}

}  // namespace monochromator
