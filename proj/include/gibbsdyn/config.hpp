// Line-oriented experiment configuration: `key = value` entries under
// `[section]` headers, with `#` comments.  Parsing validates every entry and
// reports the complete list of problems (not just the first), each tagged
// with its 1-based line number.  The format is documented in docs/formats.md.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gibbsdyn {

struct ModelConfig {
  std::string potential = "lj";  // lj | zero | power
  double c = 0.04;               // lj amplitude
  double prefactor = 1.0;        // power-law amplitude
  double exponent = 12.0;        // power-law exponent
  int dim = 1;
  double side = 10.0;
  std::string boundary = "periodic";  // free | periodic
  double z = 0.5;                // activity
};

struct SamplerConfig {
  std::uint64_t burn_in = 20000;
  std::uint64_t thinning = 0;  // 0: auto from pilot autocorrelation
  std::uint64_t count = 2000;  // samples to emit
  double p_insert = 1.0 / 3.0;
  double p_remove = 1.0 / 3.0;
  double p_displace = 1.0 / 3.0;
  double displace_sigma = 0.25;
  std::uint64_t max_particles = 4096;
  std::uint64_t seed = 1;
};

struct DynamicsConfig {
  std::string system = "gsdad";  // gsd | gsdad | env | coup
  double dt = 1e-4;
  std::uint64_t steps = 1000;
  std::uint64_t stride = 10;
  double r_rej = 0.5 * 1.122462048309373;
  double clamp = 0.0;
  std::string wall = "reflect";  // reflect | wrap
  std::uint64_t seed = 1;
};

struct VerifyConfig {
  std::vector<std::string> identities = {"all"};
  std::uint64_t samples = 20000;  // ensemble size per seed
  std::vector<std::uint64_t> seeds = {1};
  std::string sign = "auto";  // auto | plus | minus
};

struct OutputConfig {
  std::string dir;  // empty: resolved by the runner (flag > config > env > ".")
  std::string prefix = "run";
};

struct ExperimentConfig {
  ModelConfig model;
  SamplerConfig sampler;
  DynamicsConfig dynamics;
  VerifyConfig verify;
  OutputConfig output;
};

struct ConfigError {
  int line = 0;  // 0: file-level problem (e.g. cross-field constraint)
  std::string message;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

// Parse and validate.  Unknown sections/keys, malformed lines, out-of-range
// values, and keys appearing before any section header are all collected.
ParseResult parse_config(const std::string& text);

// Canonical emission of every field; emit(parse(emit(parse(text)))) equals
// emit(parse(text)) byte for byte.
std::string emit_config(const ExperimentConfig& config);

// One "line N: message" entry per error.
std::string format_errors(const std::vector<ConfigError>& errors);

}  // namespace gibbsdyn
