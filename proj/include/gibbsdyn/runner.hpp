// Shared execution engine behind the command-line tool: builds models from a
// parsed configuration, runs the sample/simulate/verify/conditions/report
// commands, and persists their artifacts.  Kept out of sight of main() so the
// integration tests can drive the exact code paths of the CLI in-process.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gibbsdyn/config.hpp"
#include "gibbsdyn/dynamics.hpp"
#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/potentials.hpp"

namespace gibbsdyn {

// Environment variable consulted for the default output directory when
// neither --out nor [output] dir is set.
inline constexpr const char* kOutputDirEnvVar = "GIBBSDYN_OUT";

struct RunOptions {
  std::string out_dir;  // from --out; empty: config, then env var, then "."
  std::optional<std::uint64_t> seed;  // from --seed; overrides every block seed
};

// Construction helpers shared with the tests.
PairPotential build_potential(const ModelConfig& model);
Box build_box(const ModelConfig& model);
EnergyModel build_energy_model(const ModelConfig& model);
SamplerParams build_sampler_params(const ModelConfig& model,
                                   const SamplerConfig& sampler);
IntegratorParams build_integrator_params(const DynamicsConfig& dynamics);

// The effective output directory for the given options/config (created if
// missing).
std::string resolve_out_dir(const RunOptions& opt, const ExperimentConfig& cfg);

// Execute one command.  Progress notes go to `log`; artifacts land in the
// resolved output directory as <prefix>_<name>.  Returns the process exit
// code: 0 on success, 1 when a requested verdict failed, 2 on usage or
// configuration errors (I/O and module errors propagate as exceptions to the
// caller, which maps them to exit 2).
int run_command(const std::string& command, const ExperimentConfig& cfg,
                const RunOptions& opt, std::ostream& log);

}  // namespace gibbsdyn
