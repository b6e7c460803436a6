// Command-line front end. Every subcommand writes CSV or JSON to stdout or
// --out, with a one-line summary on stderr.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "monochromator/cli/commands.hpp"

namespace mc = monochromator;
namespace cli = monochromator::cli;

int main(int argc, char** argv) {
  CLI::App app{"Triple-reflection matter-wave monochromator simulator"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::string material;
  std::string particle;
  std::optional<double> theta_out_deg;
  std::vector<int> orders;
  std::optional<double> v_center;
  std::optional<double> v_width;
  std::string out_path;
  std::string format = "csv";
  bool dump_default = false;
  cli::VelocityRange range;

  app.add_option("--config", config_path, "YAML or JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--material", material, "material preset (e.g. si111-h1x1)");
  app.add_option("--particle", particle, "particle preset (e.g. helium-4)");
  app.add_option("--theta-out-deg", theta_out_deg, "fixed exit angle in degrees");
  app.add_option("--order", orders, "total diffraction order(s); sign is a label")
      ->delimiter(',')
      ->allow_extra_args(false);
  app.add_option("--v-center", v_center, "central beam velocity in m/s");
  app.add_option("--v-width", v_width, "full width of the rectangular distribution in m/s");
  app.add_option("--out", out_path, "write output to this file instead of stdout");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--dump-default-config", dump_default, "print the default configuration");

  auto add_range = [&range](CLI::App* sub) {
    sub->add_option("--v-min", range.v_min, "lowest velocity in m/s");
    sub->add_option("--v-max", range.v_max, "highest velocity in m/s");
    sub->add_option("--v-step", range.v_step, "velocity step in m/s");
  };
  auto* incidence = app.add_subcommand("incidence-table", "incidence angle vs velocity per order");
  add_range(incidence);
  auto* divergence = app.add_subcommand("divergence-table", "dtheta/dv vs velocity per order");
  add_range(divergence);
  auto* paths = app.add_subcommand("paths", "three-bounce paths at --v-center");
  auto* simulate = app.add_subcommand("simulate", "ray-trace one beam, JSON result");
  auto* scan = app.add_subcommand("scan", "speed ratio vs central velocity");
  add_range(scan);

  CLI11_PARSE(app, argc, argv);

  try {
    cli::RunConfig config = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
    if (!material.empty()) config.material = material, config.material_period_angstrom.reset(),
                           config.reflection_probabilities.clear();
    if (!particle.empty()) config.particle = particle, config.particle_mass_kg.reset();
    if (theta_out_deg) config.theta_out_deg = *theta_out_deg;
    if (orders.size() == 1) config.total_order = orders.front();
    if (v_center) config.v_center_mps = *v_center;
    if (v_width) config.v_width_mps = *v_width;
    config.validate(simulate->parsed());

    cli::CommandOutput result;
    if (dump_default) {
      result.text = cli::dump_config(config_path.empty() ? cli::RunConfig{} : config);
    } else if (incidence->parsed() || divergence->parsed()) {
      const std::vector<int> table_orders = orders.empty() ? std::vector<int>{1, 2, 3} : orders;
      result = incidence->parsed() ? cli::incidence_table(config, table_orders, range)
                                   : cli::divergence_table(config, table_orders, range);
    } else if (paths->parsed()) {
      result = cli::paths_table(config, config.v_center_mps,
                                format == "json" ? cli::Format::json : cli::Format::csv);
    } else if (simulate->parsed()) {
      result = cli::simulate(config);
    } else if (scan->parsed()) {
      result = cli::scan(config, range);
    } else {
      std::cerr << app.help();
      return cli::kConfigError;
    }

    if (out_path.empty()) {
      std::cout << result.text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw mc::ConfigError("cannot write '" + out_path + "'");
      out << result.text;
    }
    if (!result.summary.empty()) std::cerr << result.summary << '\n';
    return result.exit_code;
  } catch (const mc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const mc::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  } catch (const mc::Error& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return cli::kInfeasible;
  }
}
