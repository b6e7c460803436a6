#pragma once

// Run configuration: a YAML document (JSON is accepted as well) with the
// sections particle, material, setting, device, beamline, beam, sampling and
// baseline. Every key is optional and falls back to the defaults emitted by
// dump_config(). Unknown keys are rejected. Lengths are in mm unless the key
// says otherwise, angles in degrees, velocities in m/s.

#include <yaml-cpp/yaml.h>

#include <fmt/format.h>

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "monochromator/beamline.hpp"
#include "monochromator/cli/presets.hpp"

namespace monochromator::cli {

struct PinholeMm {
  double diameter_mm = 0.0;
  double distance_mm = 0.0;

  friend bool operator==(const PinholeMm&, const PinholeMm&) = default;
};

struct RunConfig {
  // Preset name, or a free label when particle_mass_kg is given.
  std::string particle = "helium-4";
  std::optional<double> particle_mass_kg;

  // Preset name, or a free label when material_period_angstrom is given.
  std::string material = "si111-h1x1";
  std::optional<double> material_period_angstrom;
  std::vector<double> reflection_probabilities;  // custom material only

  double theta_out_deg = 85.0;
  int total_order = -1;

  double separation_mm = 5.0;
  double length_mm = 50.0;

  PinholeMm source_pinhole{1.0, 100.0};
  std::vector<PinholeMm> exit_pinholes{{10.0, 500.0}, {10.0, 1000.0}};

  double v_center_mps = 1000.0;
  double v_width_mps = 500.0;

  int velocity_bins = 2001;
  int offset_samples = 201;

  double baseline_theta_inc_deg = 50.0;
  int baseline_order = -1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  Particle particle_model() const {
    if (particle_mass_kg) return {particle, *particle_mass_kg};
    return find_particle(particle).particle();
  }

  Grating grating() const {
    if (material_period_angstrom) {
      return {*material_period_angstrom * 1e-10, reflection_probabilities};
    }
    return find_material(material).grating();
  }

  MonochromatorSetting setting() const {
    return MonochromatorSetting(deg_to_rad(theta_out_deg), total_order);
  }

  Beamline beamline() const {
    Beamline b;
    b.source = {source_pinhole.diameter_mm * 1e-3, source_pinhole.distance_mm * 1e-3};
    b.exit_pinholes.clear();
    for (const auto& p : exit_pinholes) {
      b.exit_pinholes.push_back({p.diameter_mm * 1e-3, p.distance_mm * 1e-3});
    }
    b.device = DeviceGeometry(separation_mm * 1e-3, length_mm * 1e-3);
    b.setting = setting();
    b.validate();
    return b;
  }

  BeamSpec beam() const {
    BeamSpec spec{v_center_mps, v_width_mps};
    spec.validate();
    return spec;
  }

  Sampling sampling() const {
    Sampling s{velocity_bins, offset_samples};
    s.validate();
    return s;
  }

  SingleReflectionSetup baseline() const {
    return {deg_to_rad(baseline_theta_inc_deg), baseline_order};
  }

  // Builds every model object once so that errors surface at load time.
  // The beam only matters to simulate; paths may sit below the beam's width.
  void validate(bool check_beam = true) const {
    if (material_period_angstrom.has_value() == reflection_probabilities.empty()) {
      throw ConfigError(
          "material: give either a preset name or period_angstrom together with "
          "reflection_probabilities");
    }
    (void)particle_model();
    (void)grating();
    (void)beamline();
    if (check_beam) (void)beam();
    (void)sampling();
  }
};

namespace detail {

inline void check_keys(const YAML::Node& node, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& where, T& out) {
  const auto value = node[key];
  if (!value) return;
  try {
    out = value.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, const std::string& where,
          std::optional<T>& out) {
  if (!node[key]) return;
  T value{};
  read(node, key, where, value);
  out = value;
}

inline PinholeMm read_pinhole(const YAML::Node& node, const std::string& where) {
  check_keys(node, where, {"diameter_mm", "distance_mm"});
  PinholeMm p;
  if (!node["diameter_mm"] || !node["distance_mm"]) {
    throw ConfigError(where + ": needs diameter_mm and distance_mm");
  }
  read(node, "diameter_mm", where, p.diameter_mm);
  read(node, "distance_mm", where, p.distance_mm);
  return p;
}

}  // namespace detail

inline RunConfig parse_config(const YAML::Node& root) {
  using detail::check_keys;
  using detail::read;
  RunConfig c;
  if (!root || root.IsNull()) return c;
  check_keys(root, "config",
             {"particle", "material", "setting", "device", "beamline", "beam", "sampling",
              "baseline"});

  if (const auto n = root["particle"]) {
    if (n.IsScalar()) {
      c.particle = n.as<std::string>();
    } else {
      check_keys(n, "particle", {"name", "mass_kg"});
      read(n, "name", "particle", c.particle);
      read(n, "mass_kg", "particle", c.particle_mass_kg);
    }
  }
  if (const auto n = root["material"]) {
    if (n.IsScalar()) {
      c.material = n.as<std::string>();
    } else {
      check_keys(n, "material", {"name", "period_angstrom", "reflection_probabilities"});
      read(n, "name", "material", c.material);
      read(n, "period_angstrom", "material", c.material_period_angstrom);
      read(n, "reflection_probabilities", "material", c.reflection_probabilities);
    }
  }
  if (const auto n = root["setting"]) {
    check_keys(n, "setting", {"theta_out_deg", "total_order"});
    read(n, "theta_out_deg", "setting", c.theta_out_deg);
    read(n, "total_order", "setting", c.total_order);
  }
  if (const auto n = root["device"]) {
    check_keys(n, "device", {"separation_mm", "length_mm"});
    read(n, "separation_mm", "device", c.separation_mm);
    read(n, "length_mm", "device", c.length_mm);
  }
  if (const auto n = root["beamline"]) {
    check_keys(n, "beamline", {"source_pinhole", "exit_pinholes"});
    if (const auto s = n["source_pinhole"]) {
      c.source_pinhole = detail::read_pinhole(s, "beamline.source_pinhole");
    }
    if (const auto list = n["exit_pinholes"]) {
      if (!list.IsSequence()) throw ConfigError("beamline.exit_pinholes: expected a list");
      c.exit_pinholes.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        c.exit_pinholes.push_back(
            detail::read_pinhole(list[i], fmt::format("beamline.exit_pinholes[{}]", i)));
      }
    }
  }
  if (const auto n = root["beam"]) {
    check_keys(n, "beam", {"v_center_mps", "v_width_mps", "distribution"});
    read(n, "v_center_mps", "beam", c.v_center_mps);
    read(n, "v_width_mps", "beam", c.v_width_mps);
    if (n["distribution"] && n["distribution"].as<std::string>() != "rectangular") {
      throw ConfigError("beam.distribution: only 'rectangular' is supported");
    }
  }
  if (const auto n = root["sampling"]) {
    check_keys(n, "sampling", {"velocity_bins", "offset_samples"});
    read(n, "velocity_bins", "sampling", c.velocity_bins);
    read(n, "offset_samples", "sampling", c.offset_samples);
  }
  if (const auto n = root["baseline"]) {
    check_keys(n, "baseline", {"theta_inc_deg", "order"});
    read(n, "theta_inc_deg", "baseline", c.baseline_theta_inc_deg);
    read(n, "order", "baseline", c.baseline_order);
  }
  c.validate();
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML/JSON: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

inline std::string dump_config(const RunConfig& c) {
  std::string out;
  auto line = [&out](const std::string& s) { out += s + '\n'; };
  line("# Monochromator run configuration. Lengths in mm, angles in degrees,");
  line("# velocities in m/s. Omitted keys take the values shown here.");
  if (c.particle_mass_kg) {
    line(fmt::format("particle:\n  name: {}\n  mass_kg: {}", c.particle, *c.particle_mass_kg));
  } else {
    line(fmt::format("particle: {}            # preset, or {{name: ..., mass_kg: ...}}",
                     c.particle));
  }
  if (c.material_period_angstrom) {
    line(fmt::format("material:\n  name: {}\n  period_angstrom: {}\n  reflection_probabilities: [{}]",
                     c.material, *c.material_period_angstrom,
                     fmt::join(c.reflection_probabilities, ", ")));
  } else {
    line(fmt::format(
        "material: {}          # preset, or {{name, period_angstrom, reflection_probabilities}}",
        c.material));
  }
  line("setting:");
  line(fmt::format("  theta_out_deg: {}", c.theta_out_deg));
  line(fmt::format("  total_order: {}            # sign is a label; |N| selects the order",
                   c.total_order));
  line("device:");
  line(fmt::format("  separation_mm: {}", c.separation_mm));
  line(fmt::format("  length_mm: {}", c.length_mm));
  line("beamline:");
  line(fmt::format("  source_pinhole: {{diameter_mm: {}, distance_mm: {}}}",
                   c.source_pinhole.diameter_mm, c.source_pinhole.distance_mm));
  line("  exit_pinholes:");
  for (const auto& p : c.exit_pinholes) {
    line(fmt::format("    - {{diameter_mm: {}, distance_mm: {}}}", p.diameter_mm, p.distance_mm));
  }
  line("beam:");
  line(fmt::format("  v_center_mps: {}", c.v_center_mps));
  line(fmt::format("  v_width_mps: {}", c.v_width_mps));
  line("  distribution: rectangular");
  line("sampling:");
  line(fmt::format("  velocity_bins: {}", c.velocity_bins));
  line(fmt::format("  offset_samples: {}", c.offset_samples));
  line("baseline:");
  line(fmt::format("  theta_inc_deg: {}", c.baseline_theta_inc_deg));
  line(fmt::format("  order: {}", c.baseline_order));
  return out;
}

}  // namespace monochromator::cli
