#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace curvtest;
  CLI::App app{"curvtest: conformal energies and identity suites for immersed 4-manifolds"};
  app.require_subcommand(1);

  struct Opts {
    std::string config;
    std::string preset, out;
    int grid = 0;
    long long seed = -1;
    int points = 0, threads = 0;
    bool wrong_codazzi = false;
  };
  Opts o;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "flat key = value configuration file")->required();
    sub->add_option("--preset", o.preset, "preset name (overrides the config)");
    sub->add_option("--grid", o.grid, "grid size (meaning depends on the command)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output directory for report.json and report.csv");
    sub->add_option("--points", o.points, "sample points per preset");
    sub->add_option("--threads", o.threads, "worker threads for pointwise suites");
    sub->add_flag("--debug-wrong-codazzi", o.wrong_codazzi, "negative control: Codazzi factor 2 instead of 4");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = load_config(o.config);
    if (!o.preset.empty() && o.preset != cfg.preset.value_or("")) {
      // preset_params in the file belong to the file's preset.
      cfg.preset = parse_config("preset = " + o.preset).preset;
      cfg.preset_params.clear();
    }
    if (o.grid != 0) {
      if (o.grid < 1) throw ConfigError("--grid must be positive");
      cfg.grid = o.grid;
    }
    if (o.seed >= 0) cfg.seed = std::uint64_t(o.seed);
    if (!o.out.empty()) cfg.out = o.out;
    if (o.points != 0) {
      if (o.points < 1) throw ConfigError("--points must be positive");
      cfg.points = o.points;
    }
    if (o.threads != 0) {
      if (o.threads < 1) throw ConfigError("--threads must be positive");
      cfg.threads = o.threads;
    }
    if (o.wrong_codazzi) cfg.codazzi_factor = 2.0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }

  CommandResult res;
  try {
    res = run_command(cmd, cfg);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  for (const auto& m : res.messages) std::cout << m << "\n";
  try {
    write_reports(res, cfg.out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  std::cout << "reports written to " << cfg.out << "/report.{json,csv}; exit " << res.exit_code << "\n";
  return res.exit_code;
}
