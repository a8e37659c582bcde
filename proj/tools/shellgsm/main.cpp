#include <CLI/CLI.hpp>

#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include "config.hpp"
#include "scenario.hpp"
#include "shellgsm/shellgsm.h"

using namespace shellgsm::cli;

int main(int argc, char** argv) {
  CLI::App app{"Spherical-shell embedding of antenna scattering matrices"};
  app.set_version_flag("--version", std::string(sg_version()));
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::optional<int> lmax_override;
  std::optional<double> tol;

  const std::pair<const char*, const char*> commands[] = {
      {"sso", "Shell operator entries per mode (sso.csv)"},
      {"compose", "Effective GSM (effective_gsm.json, sparams.csv)"},
      {"sparams", "Port S-parameters of the embedded antenna (sparams.csv)"},
      {"pattern", "Gain and far field on the xoz cut (pattern.csv)"},
      {"rcs", "Bistatic RCS on the xoz cut (rcs.csv)"},
      {"validate", "Oracle checks for the configured shell (validate.csv)"},
      {"sweep", "Material sweep of one layer with the antenna loaded once (sweep.csv)"},
      {"run", "Run the task named in the [task] section"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file")->required();
    sub->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", options.threads, "Worker threads over frequency points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--lmax-override", lmax_override, "Truncation degree instead of the automatic rule");
    sub->add_option("--tol", tol, "Relative tolerance of the radial ODE integration");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }
  options.lmax_override = lmax_override;
  options.tol = tol;

  std::string task = app.get_subcommands().front()->get_name();
  try {
    const Config config = load_config(config_path);
    if (task == "run") {
      if (config.task.type.empty()) throw ConfigError("'run' needs a [task] section with a type");
      task = config.task.type;
    }
    return run_task(task, config, options);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "shellgsm: config error: %s: %s\n", config_path.c_str(), e.what());
    return exit_config;
  } catch (const RunError& e) {
    std::fprintf(stderr, "shellgsm: %s\n", e.what());
    return e.code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "shellgsm: internal error: %s\n", e.what());
    return exit_numeric;
  }
}
