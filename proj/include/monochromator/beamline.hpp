#pragma once

// Planar ray optics of a velocity-distributed atom beam: source pinhole,
// two parallel gratings (or one, for the baseline), and exit pinholes
// centred on the exit ray of the central velocity.
//
// Frame: the lower plate lies on y = 0 and the upper plate on y = s, both
// spanning x in [0, l]. The beam enters through the open end at x = 0 and
// travels towards +x. Exit pinholes are slits perpendicular to the central
// exit ray, at their distance measured along that ray from its last
// reflection point.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monochromator/device.hpp"
#include "monochromator/diffraction.hpp"
#include "monochromator/parallel.hpp"

namespace monochromator {

enum class VelocityDistribution { rectangular };

struct BeamSpec {
  double center_velocity = 1000.0;  // m/s
  double full_width = 500.0;        // m/s
  VelocityDistribution distribution = VelocityDistribution::rectangular;

  void validate() const {
    if (!(full_width > 0.0) || !(center_velocity > full_width / 2)) {
      throw ConfigError("beam needs center_velocity > full_width / 2 > 0");
    }
  }
  double lowest() const noexcept { return center_velocity - full_width / 2; }
  double highest() const noexcept { return center_velocity + full_width / 2; }
  double input_speed_ratio() const noexcept { return center_velocity / full_width; }

  friend bool operator==(const BeamSpec&, const BeamSpec&) = default;
};

struct Pinhole {
  double diameter = 0.0;  // m, slit width in the diffraction plane
  double distance = 0.0;  // m

  friend bool operator==(const Pinhole&, const Pinhole&) = default;
};

struct Beamline {
  Pinhole source{1e-3, 0.1};
  std::vector<Pinhole> exit_pinholes{{1e-2, 0.5}, {1e-2, 1.0}};
  DeviceGeometry device{5e-3, 5e-2};
  MonochromatorSetting setting{};

  void validate() const {
    auto positive = [](const Pinhole& p) { return p.diameter > 0.0 && p.distance > 0.0; };
    if (!positive(source)) throw ConfigError("source pinhole needs positive size and distance");
    double last = 0.0;
    for (const auto& p : exit_pinholes) {
      if (!positive(p)) throw ConfigError("exit pinholes need positive size and distance");
      if (!(p.distance > last)) {
        throw ConfigError("exit pinholes must be ordered by increasing distance");
      }
      last = p.distance;
    }
  }

  friend bool operator==(const Beamline&, const Beamline&) = default;
};

struct Sampling {
  int velocity_bins = 2001;
  int offset_samples = 201;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (velocity_bins < 1 || offset_samples < 1) {
      throw ConfigError("sampling needs at least one velocity bin and one offset");
    }
  }

  friend bool operator==(const Sampling&, const Sampling&) = default;
};

// Outgoing ray after the last reflection, which happens on the lower plate at
// x = origin; angle is measured from the plate normal.
struct ExitRay {
  double origin = 0.0;
  double angle = 0.0;
};

struct HistogramBin {
  double velocity = 0.0;  // bin centre, m/s
  double weight = 0.0;
};

struct BeamlineResult {
  std::vector<HistogramBin> histogram;  // one entry per velocity bin
  double mean_velocity = 0.0;
  double delta_v = 0.0;      // FWHM
  double delta_v_std = 0.0;  // weighted standard deviation
  double speed_ratio = 0.0;
  double input_speed_ratio = 0.0;
  double throughput = 0.0;  // transmitted / launched weight
  double theta_inc = 0.0;
  std::vector<int> orders;  // bounce orders of the traced path
  std::optional<DiffractionPath> path;
};

namespace detail {

struct PlateStack {
  double separation = 0.0;
  double length = 0.0;
  bool enclosed = true;  // false: a single open plate
};

// Follows one ray through the bounce sequence. Reflections alternate between
// the lower and the upper plate; first_hit is x of the first reflection.
inline std::optional<ExitRay> trace_orders(std::span<const int> orders, double theta_inc,
                                           double first_hit, double step,
                                           const PlateStack& plates) {
  const double s = plates.separation;
  const double l = plates.length;
  if (plates.enclosed && first_hit > s * std::tan(theta_inc)) return std::nullopt;  // no entry

  double x = first_hit;
  double angle = theta_inc;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (x < 0.0 || x > l) return std::nullopt;
    const double sine = std::sin(angle) + orders[i] * step;
    if (!propagates(sine)) return std::nullopt;
    angle = std::asin(sine);
    if (i + 1 < orders.size()) x += s * std::tan(angle);
  }
  if (plates.enclosed && !(angle > 0.0 && x + s * std::tan(angle) > l)) return std::nullopt;
  return ExitRay{x, angle};
}

// Slits perpendicular to the central exit ray.
class ApertureTrain {
 public:
  ApertureTrain(const ExitRay& central, std::span<const Pinhole> pinholes)
      : central_(central), pinholes_(pinholes.begin(), pinholes.end()) {}

  // Transverse offset of `ray` in the plane of pinhole k; nullopt if the ray
  // never reaches that plane.
  std::optional<double> offset(const ExitRay& ray, std::size_t k) const {
    const double tilt = ray.angle - central_.angle;
    if (!(std::cos(tilt) > 0.0)) return std::nullopt;
    const double shift = ray.origin - central_.origin;
    const double along = pinholes_[k].distance - shift * std::sin(central_.angle);
    if (!(along > 0.0)) return std::nullopt;
    return shift * std::cos(central_.angle) + along * std::tan(tilt);
  }

  bool passes(const ExitRay& ray) const {
    for (std::size_t k = 0; k < pinholes_.size(); ++k) {
      const auto off = offset(ray, k);
      if (!off || std::abs(*off) > pinholes_[k].diameter / 2) return false;
    }
    return true;
  }

 private:
  ExitRay central_;
  std::vector<Pinhole> pinholes_;
};

// Shared pipeline for the device and the baseline. trace(v, u) follows the
// ray of velocity v launched at transverse offset u in the source pinhole.
template <class Trace>
BeamlineResult run_beam(const BeamSpec& spec, const Sampling& sampling, double source_diameter,
                        const ApertureTrain& apertures, double transmission, Trace&& trace) {
  const auto nv = static_cast<std::size_t>(sampling.velocity_bins);
  const auto nu = static_cast<std::size_t>(sampling.offset_samples);
  const double bin = spec.full_width / static_cast<double>(nv);
  const double lo = spec.lowest();
  const double hi = spec.highest();

  auto offset_at = [&](std::size_t j) {
    return -source_diameter / 2 + (static_cast<double>(j) + 0.5) * source_diameter /
                                      static_cast<double>(nu);
  };
  auto count = [&](double v) {
    std::size_t passed = 0;
    for (std::size_t j = 0; j < nu; ++j) {
      const auto ray = trace(v, offset_at(j));
      if (ray && apertures.passes(*ray)) ++passed;
    }
    return passed;
  };

  std::vector<double> velocities(nv);
  for (std::size_t i = 0; i < nv; ++i) velocities[i] = lo + (static_cast<double>(i) + 0.5) * bin;
  std::vector<std::size_t> counts(nv, 0);
  parallel_for(nv, sampling.threads, [&](std::size_t i) { counts[i] = count(velocities[i]); });

  BeamlineResult result;
  result.input_speed_ratio = spec.input_speed_ratio();
  result.histogram.resize(nv);
  const double unit = transmission / (static_cast<double>(nv) * static_cast<double>(nu));
  double total = 0.0;
  double first = 0.0;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < nv; ++i) {
    const double w = static_cast<double>(counts[i]) * unit;
    result.histogram[i] = {velocities[i], w};
    total += w;
    first += w * velocities[i];
    peak = std::max(peak, counts[i]);
  }
  if (peak == 0) {
    throw EmptyTransmission("no ray passes every aperture for v_center = " +
                            std::to_string(spec.center_velocity) + " m/s, width " +
                            std::to_string(spec.full_width) + " m/s");
  }
  result.throughput = total;
  result.mean_velocity = first / total;
  double second = 0.0;
  for (const auto& b : result.histogram) {
    second += b.weight * (b.velocity - result.mean_velocity) * (b.velocity - result.mean_velocity);
  }
  result.delta_v_std = std::sqrt(second / total);

  // Half-maximum crossings, refined between the bracketing grid samples.
  const double half = static_cast<double>(peak) / 2;
  auto above = [&](double v) { return static_cast<double>(count(v)) >= half; };
  auto refine = [&](double outside, double inside) {
    for (int it = 0; it < 200 && std::abs(inside - outside) > 1e-12 * inside; ++it) {
      const double mid = 0.5 * (outside + inside);
      (above(mid) ? inside : outside) = mid;
    }
    return 0.5 * (outside + inside);
  };
  std::size_t left = 0;
  while (static_cast<double>(counts[left]) < half) ++left;
  std::size_t right = nv - 1;
  while (static_cast<double>(counts[right]) < half) --right;
  const double v_left = left == 0 ? lo : refine(velocities[left - 1], velocities[left]);
  const double v_right = right == nv - 1 ? hi : refine(velocities[right + 1], velocities[right]);
  result.delta_v = v_right - v_left;
  result.speed_ratio = result.mean_velocity / result.delta_v;
  return result;
}

}  // namespace detail

// Ray of velocity v through the three-bounce path. offset is the transverse
// launch position inside the source pinhole (0 = central ray).
inline std::optional<ExitRay> trace_velocity(double velocity, const DiffractionPath& path,
                                             const Beamline& beamline, const Particle& particle,
                                             const Grating& grating, double theta_inc,
                                             double offset = 0.0) {
  const auto& device = beamline.device;
  if (span_for(path, device) >= device.length()) {
    throw ConfigError("path span exceeds the device length");
  }
  const int orders[] = {path.n1, path.n2, path.n3};
  const double first_hit =
      device.separation() / 2 * std::tan(theta_inc) + offset / std::cos(theta_inc);
  return detail::trace_orders(orders, theta_inc, first_hit,
                              order_step(particle, grating, velocity),
                              {device.separation(), device.length(), true});
}

// Highest-transmission path whose central ray traverses the device; ties go
// to the first in enumeration order.
inline std::optional<DiffractionPath> select_path(const Beamline& beamline,
                                                  const Particle& particle,
                                                  const Grating& grating, double velocity,
                                                  double theta_inc) {
  std::optional<DiffractionPath> best;
  for (const auto& path :
       enumerate_paths(beamline.setting, particle, grating, velocity, theta_inc)) {
    if (!path.transmission) continue;
    if (span_for(path, beamline.device) >= beamline.device.length()) continue;
    if (!trace_velocity(velocity, path, beamline, particle, grating, theta_inc)) continue;
    if (!best || *path.transmission > *best->transmission) best = path;
  }
  return best;
}

// Transmitted velocity distribution of the device. With no path given, one is
// chosen by select_path() at the central velocity.
inline BeamlineResult simulate_beam(const BeamSpec& spec, const Beamline& beamline,
                                    const Particle& particle, const Grating& grating,
                                    std::optional<DiffractionPath> path = std::nullopt,
                                    const Sampling& sampling = {}) {
  spec.validate();
  beamline.validate();
  sampling.validate();
  const double v0 = spec.center_velocity;
  const double theta_inc = incidence_for_output(beamline.setting, particle, grating, v0);
  if (!path) path = select_path(beamline, particle, grating, v0, theta_inc);
  if (!path) {
    throw EmptyTransmission("no path of total order " +
                            std::to_string(beamline.setting.total_order()) +
                            " traverses the device at " + std::to_string(v0) + " m/s");
  }
  const auto central = trace_velocity(v0, *path, beamline, particle, grating, theta_inc);
  if (!central) throw EmptyTransmission("central ray is blocked inside the device");

  const detail::ApertureTrain apertures(*central, beamline.exit_pinholes);
  const double rho = path->transmission ? *path->transmission : path_transmission(*path, grating);
  auto result = detail::run_beam(
      spec, sampling, beamline.source.diameter, apertures, rho, [&](double v, double u) {
        return trace_velocity(v, *path, beamline, particle, grating, theta_inc, u);
      });
  result.theta_inc = theta_inc;
  result.orders = {path->n1, path->n2, path->n3};
  result.path = path;
  return result;
}

// One reflection off a single plate of the device's length, hit at its middle.
struct SingleReflectionSetup {
  double theta_inc = deg_to_rad(50.0);
  int order = -1;

  friend bool operator==(const SingleReflectionSetup&, const SingleReflectionSetup&) = default;
};

inline BeamlineResult single_reflection_baseline(const BeamSpec& spec, const Beamline& beamline,
                                                 const SingleReflectionSetup& setup,
                                                 const Particle& particle,
                                                 const Grating& grating,
                                                 const Sampling& sampling = {}) {
  spec.validate();
  beamline.validate();
  sampling.validate();
  const detail::PlateStack plate{beamline.device.separation(), beamline.device.length(), false};
  const int orders[] = {setup.order};
  auto trace = [&](double v, double u) {
    const double first_hit = plate.length / 2 + u / std::cos(setup.theta_inc);
    return detail::trace_orders(orders, setup.theta_inc, first_hit,
                                order_step(particle, grating, v), plate);
  };
  const auto central = trace(spec.center_velocity, 0.0);
  if (!central) {
    throw EmptyTransmission("single-reflection order " + std::to_string(setup.order) +
                            " does not propagate at " +
                            std::to_string(spec.center_velocity) + " m/s");
  }
  const detail::ApertureTrain apertures(*central, beamline.exit_pinholes);
  auto result = detail::run_beam(spec, sampling, beamline.source.diameter, apertures,
                                 grating.probability(setup.order), trace);
  result.theta_inc = setup.theta_inc;
  result.orders = {setup.order};
  return result;
}

struct ScanRow {
  double v_center = 0.0;
  double input_speed_ratio = 0.0;
  std::optional<double> speed_ratio;
  std::optional<double> baseline_speed_ratio;
  double throughput = 0.0;
  std::string flag;  // ok | below_cutoff | empty_transmission | baseline_empty
};

// Speed ratio of device and baseline against the central velocity;
// theta_inc is re-solved for every row.
inline std::vector<ScanRow> scan_speed_ratio(double v_min, double v_max, double v_step,
                                             double width, const Beamline& beamline,
                                             const Particle& particle, const Grating& grating,
                                             const SingleReflectionSetup& baseline = {},
                                             const Sampling& sampling = {}) {
  if (!(v_step > 0.0) || !(v_max >= v_min)) throw ConfigError("scan needs v_min <= v_max, step > 0");
  const auto rows = static_cast<std::size_t>(std::floor((v_max - v_min) / v_step + 1e-9)) + 1;

  std::vector<ScanRow> table;
  table.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    ScanRow row;
    row.v_center = v_min + static_cast<double>(i) * v_step;
    const BeamSpec spec{row.v_center, width};
    spec.validate();
    row.input_speed_ratio = spec.input_speed_ratio();
    try {
      const auto main = simulate_beam(spec, beamline, particle, grating, std::nullopt, sampling);
      row.speed_ratio = main.speed_ratio;
      row.throughput = main.throughput;
      row.flag = "ok";
    } catch (const BelowCutoff&) {
      row.flag = "below_cutoff";
    } catch (const EmptyTransmission&) {
      row.flag = "empty_transmission";
    }
    try {
      row.baseline_speed_ratio =
          single_reflection_baseline(spec, beamline, baseline, particle, grating, sampling)
              .speed_ratio;
    } catch (const EmptyTransmission&) {
      if (row.flag == "ok") row.flag = "baseline_empty";
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace monochromator
