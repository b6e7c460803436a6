#pragma once

// Subcommand bodies. Each returns the exact bytes to write plus the process
// exit code, so the tool's main() is only argument plumbing.

#include <fmt/format.h>

#include <json.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monochromator/beamline.hpp"
#include "monochromator/cli/config.hpp"
#include "monochromator/device.hpp"

namespace monochromator::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kInfeasible = 3 };

struct CommandOutput {
  std::string text;
  int exit_code = kSuccess;
  std::string summary;  // one human-readable line for stderr
};

struct VelocityRange {
  double v_min = 300.0;
  double v_max = 5000.0;
  double v_step = 100.0;

  std::vector<double> values() const {
    if (!(v_step > 0.0) || !(v_max >= v_min) || !(v_min > 0.0)) {
      throw ConfigError("velocity range needs 0 < v_min <= v_max and v_step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((v_max - v_min) / v_step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = v_min + static_cast<double>(i) * v_step;
    return v;
  }
};

namespace detail {

inline std::string num(double x) { return fmt::format("{}", x); }

inline std::string opt(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

}  // namespace detail

inline CommandOutput incidence_table(const RunConfig& config, std::span<const int> orders,
                                     const VelocityRange& range) {
  const auto particle = config.particle_model();
  const auto grating = config.grating();
  CommandOutput out;
  out.text = "velocity_mps,order,theta_inc_deg,status\n";
  std::size_t valid = 0;
  std::size_t rows = 0;
  for (double v : range.values()) {
    for (int order : orders) {
      const MonochromatorSetting setting(deg_to_rad(config.theta_out_deg), order);
      ++rows;
      try {
        const double theta = incidence_for_output(setting, particle, grating, v);
        out.text += fmt::format("{},{},{},ok\n", detail::num(v), order,
                                detail::num(rad_to_deg(theta)));
        ++valid;
      } catch (const BelowCutoff&) {
        out.text += fmt::format("{},{},,below_cutoff\n", detail::num(v), order);
      }
    }
  }
  out.exit_code = valid == 0 ? kInfeasible : kSuccess;
  out.summary = fmt::format("{} of {} rows above cutoff", valid, rows);
  return out;
}

inline CommandOutput divergence_table(const RunConfig& config, std::span<const int> orders,
                                      const VelocityRange& range) {
  const auto particle = config.particle_model();
  const auto grating = config.grating();
  CommandOutput out;
  out.text = "velocity_mps,order,dtheta_dv_rad_per_mps,status\n";
  std::size_t valid = 0;
  std::size_t rows = 0;
  for (double v : range.values()) {
    for (int order : orders) {
      const MonochromatorSetting setting(deg_to_rad(config.theta_out_deg), order);
      ++rows;
      try {
        const double theta = incidence_for_output(setting, particle, grating, v);
        const double slope =
            velocity_divergence(theta, setting.selected_order(), particle, grating, v);
        out.text += fmt::format("{},{},{},ok\n", detail::num(v), order, detail::num(slope));
        ++valid;
      } catch (const BelowCutoff&) {
        out.text += fmt::format("{},{},,below_cutoff\n", detail::num(v), order);
      } catch (const GrazingSingularity&) {
        out.text += fmt::format("{},{},,grazing\n", detail::num(v), order);
      }
    }
  }
  out.exit_code = valid == 0 ? kInfeasible : kSuccess;
  out.summary = fmt::format("{} of {} rows evaluated", valid, rows);
  return out;
}

enum class Format { csv, json };

inline CommandOutput paths_table(const RunConfig& config, double velocity, Format format) {
  const auto particle = config.particle_model();
  const auto grating = config.grating();
  const auto setting = config.setting();
  const double ratio = config.length_mm / config.separation_mm;

  CommandOutput out;
  std::vector<DiffractionPath> paths;
  std::optional<double> theta_inc;
  try {
    theta_inc = incidence_for_output(setting, particle, grating, velocity);
    paths = enumerate_paths(setting, particle, grating, velocity, *theta_inc);
  } catch (const BelowCutoff&) {
    out.exit_code = kInfeasible;
  }
  const auto groups = group_paths_by_geometry(paths);

  struct Row {
    DiffractionPath path;
    FeasibilityBand band;
    std::size_t group;
  };
  std::vector<Row> rows;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& p : groups[g].members) rows.push_back({p, feasibility_band(p, setting), g});
  }

  auto percent = [](const DiffractionPath& p) -> std::optional<double> {
    if (!p.transmission) return std::nullopt;
    return *p.transmission * 100.0;
  };

  if (format == Format::csv) {
    out.text =
        "n1,n2,n3,alpha1_deg,alpha2_deg,d_over_s,band_low,band_high,transmission_percent,group,"
        "contains_l_over_s\n";
    for (const auto& r : rows) {
      out.text += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.path.n1, r.path.n2,
                              r.path.n3, detail::num(rad_to_deg(r.path.alpha1)),
                              detail::num(rad_to_deg(r.path.alpha2)),
                              detail::num(r.path.geometry_ratio), detail::num(r.band.lower),
                              detail::num(r.band.upper), detail::opt(percent(r.path)), r.group,
                              r.band.contains(ratio) ? "true" : "false");
    }
  } else {
    nlohmann::json doc;
    doc["velocity_mps"] = velocity;
    doc["theta_inc_deg"] = theta_inc ? nlohmann::json(rad_to_deg(*theta_inc)) : nullptr;
    doc["l_over_s"] = ratio;
    doc["considered"] = considered_combinations(grating);
    doc["surviving"] = paths.size();
    doc["groups"] = groups.size();
    doc["paths"] = nlohmann::json::array();
    for (const auto& r : rows) {
      const auto pct = percent(r.path);
      doc["paths"].push_back({{"n1", r.path.n1},
                              {"n2", r.path.n2},
                              {"n3", r.path.n3},
                              {"alpha1_deg", rad_to_deg(r.path.alpha1)},
                              {"alpha2_deg", rad_to_deg(r.path.alpha2)},
                              {"d_over_s", r.path.geometry_ratio},
                              {"band_low", r.band.lower},
                              {"band_high", r.band.upper},
                              {"transmission_percent", pct ? nlohmann::json(*pct) : nullptr},
                              {"group", r.group},
                              {"contains_l_over_s", r.band.contains(ratio)}});
    }
    out.text = doc.dump(2) + "\n";
  }
  out.summary = fmt::format("{} of {} combinations propagate, {} geometry groups",
                            paths.size(), considered_combinations(grating), groups.size());
  return out;
}

namespace detail {

inline nlohmann::json result_json(const BeamlineResult& r) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& b : r.histogram) {
    if (b.weight > 0.0) hist.push_back({{"velocity_mps", b.velocity}, {"weight", b.weight}});
  }
  return {{"theta_inc_deg", rad_to_deg(r.theta_inc)},
          {"orders", r.orders},
          {"mean_velocity_mps", r.mean_velocity},
          {"delta_v_mps", r.delta_v},
          {"delta_v_std_mps", r.delta_v_std},
          {"speed_ratio", r.speed_ratio},
          {"input_speed_ratio", r.input_speed_ratio},
          {"throughput", r.throughput},
          {"histogram", hist}};
}

}  // namespace detail

inline CommandOutput simulate(const RunConfig& config) {
  const auto particle = config.particle_model();
  const auto grating = config.grating();
  const auto beamline = config.beamline();
  const auto spec = config.beam();
  const auto sampling = config.sampling();

  CommandOutput out;
  nlohmann::json doc;
  doc["v_center_mps"] = spec.center_velocity;
  doc["v_width_mps"] = spec.full_width;
  try {
    const auto result = simulate_beam(spec, beamline, particle, grating, std::nullopt, sampling);
    doc["result"] = detail::result_json(result);
    if (result.path) doc["result"]["d_over_s"] = result.path->geometry_ratio;
    out.summary = fmt::format("v = {:.1f} m/s: speed ratio {:.1f} (input {:.2f}), throughput {:.3g}",
                              spec.center_velocity, result.speed_ratio, result.input_speed_ratio,
                              result.throughput);
  } catch (const Error& e) {
    doc["result"] = nullptr;
    doc["error"] = e.what();
    out.exit_code = kInfeasible;
    out.summary = e.what();
  }
  try {
    doc["baseline"] = detail::result_json(single_reflection_baseline(
        spec, beamline, config.baseline(), particle, grating, sampling));
  } catch (const EmptyTransmission&) {
    doc["baseline"] = nullptr;
  }
  out.text = doc.dump(2) + "\n";
  return out;
}

inline CommandOutput scan(const RunConfig& config, const VelocityRange& range) {
  const auto particle = config.particle_model();
  const auto grating = config.grating();
  const auto beamline = config.beamline();
  (void)range.values();
  const auto rows = scan_speed_ratio(range.v_min, range.v_max, range.v_step, config.v_width_mps,
                                     beamline, particle, grating, config.baseline(),
                                     config.sampling());
  CommandOutput out;
  out.text = "v_center_mps,S_in,S_out,S_baseline,throughput,flag\n";
  std::size_t ok = 0;
  for (const auto& r : rows) {
    out.text += fmt::format("{},{},{},{},{},{}\n", detail::num(r.v_center),
                            detail::num(r.input_speed_ratio), detail::opt(r.speed_ratio),
                            detail::opt(r.baseline_speed_ratio), detail::num(r.throughput),
                            r.flag);
    if (r.speed_ratio) ++ok;
  }
  out.exit_code = ok == 0 ? kInfeasible : kSuccess;
  out.summary = fmt::format("{} of {} scan rows transmitted", ok, rows.size());
  return out;
}

}  // namespace monochromator::cli
