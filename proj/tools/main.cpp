// Command-line front end.  All real work lives in the library's run_command
// so the same code paths are exercised by the integration tests; this file
// only parses arguments, loads the configuration, and maps errors to exit
// codes (0 success, 1 failed verdict, 2 usage/configuration/runtime error).
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gibbsdyn/config.hpp"
#include "gibbsdyn/runner.hpp"
#include "gibbsdyn/trajectory.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Finite-volume interacting Brownian particle systems: equilibrium "
      "sampling, stochastic dynamics, and self-verification."};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "gibbsdyn 0.1.0");

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_value = 0;
  auto* config_opt = app.add_option("-c,--config", config_path,
                                    "experiment configuration file");
  app.add_option("--out", out_dir,
                 "output directory (overrides [output] dir and " +
                     std::string(gibbsdyn::kOutputDirEnvVar) + ")");
  auto* seed_opt = app.add_option(
      "--seed", seed_value, "override every seed in the configuration");

  app.add_subcommand("sample",
                     "draw an equilibrium ensemble and write it to disk");
  app.add_subcommand("simulate", "integrate the configured particle system");
  app.add_subcommand("verify",
                     "run the structural identity suite against fresh samples");
  app.add_subcommand("conditions",
                     "check admissibility conditions on the potential");
  app.add_subcommand("report", "digest artifacts from previous runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message / help text
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();

  gibbsdyn::ExperimentConfig cfg;
  if (config_opt->count() > 0) {
    std::string text;
    try {
      text = gibbsdyn::read_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    gibbsdyn::ParseResult parsed = gibbsdyn::parse_config(text);
    if (!parsed.ok()) {
      std::cerr << gibbsdyn::format_errors(parsed.errors);
      return 2;
    }
    cfg = parsed.config;
  } else if (command != "report") {
    std::cerr << "error: " << command << " requires --config\n";
    return 2;
  }

  gibbsdyn::RunOptions opt;
  opt.out_dir = out_dir;
  if (seed_opt->count() > 0) opt.seed = seed_value;

  try {
    return gibbsdyn::run_command(command, cfg, opt, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
