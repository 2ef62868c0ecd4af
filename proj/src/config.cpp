#include "gibbsdyn/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace gibbsdyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Parser {
  ExperimentConfig cfg;
  std::vector<ConfigError> errors;

  void fail(int line, const std::string& msg) { errors.push_back({line, msg}); }

  bool to_double(const std::string& raw, int line, const std::string& key, double& out) {
    try {
      std::size_t pos = 0;
      out = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      if (!std::isfinite(out)) throw std::invalid_argument("");
      return true;
    } catch (...) {
      fail(line, "value of '" + key + "' is not a finite number: '" + raw + "'");
      return false;
    }
  }

  bool to_u64(const std::string& raw, int line, const std::string& key,
              std::uint64_t& out) {
    try {
      if (!raw.empty() && raw[0] == '-') throw std::invalid_argument("");
      std::size_t pos = 0;
      out = std::stoull(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return true;
    } catch (...) {
      fail(line, "value of '" + key + "' is not a non-negative integer: '" + raw + "'");
      return false;
    }
  }

  void set_double(double& field, const std::string& raw, int line,
                  const std::string& key, double lo, double hi,
                  bool lo_strict = false) {
    double v;
    if (!to_double(raw, line, key, v)) return;
    if (v < lo || v > hi || (lo_strict && v == lo)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "value of '%s' out of range %s%g, %g]: %g",
                    key.c_str(), lo_strict ? "(" : "[", lo, hi, v);
      fail(line, buf);
      return;
    }
    field = v;
  }

  void set_u64(std::uint64_t& field, const std::string& raw, int line,
               const std::string& key, std::uint64_t lo,
               std::uint64_t hi = UINT64_MAX) {
    std::uint64_t v;
    if (!to_u64(raw, line, key, v)) return;
    if (v < lo || v > hi) {
      fail(line, "value of '" + key + "' out of range [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]: " + std::to_string(v));
      return;
    }
    field = v;
  }

  void set_choice(std::string& field, const std::string& raw, int line,
                  const std::string& key, std::vector<std::string> allowed) {
    for (const auto& a : allowed)
      if (raw == a) {
        field = raw;
        return;
      }
    std::string opts;
    for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
    fail(line, "value of '" + key + "' must be one of {" + opts + "}: '" + raw + "'");
  }

  void apply(const std::string& section, const std::string& key,
             const std::string& raw, int line) {
    if (section == "model") {
      if (key == "potential")
        set_choice(cfg.model.potential, raw, line, key, {"lj", "zero", "power"});
      else if (key == "c")
        set_double(cfg.model.c, raw, line, key, 0.0, 1e6, true);
      else if (key == "prefactor")
        set_double(cfg.model.prefactor, raw, line, key, 0.0, 1e6, true);
      else if (key == "exponent")
        set_double(cfg.model.exponent, raw, line, key, 0.0, 1e3, true);
      else if (key == "dim") {
        std::uint64_t d = 1;
        set_u64(d, raw, line, key, 1, 3);
        cfg.model.dim = static_cast<int>(d);
      } else if (key == "side")
        set_double(cfg.model.side, raw, line, key, 0.0, 1e9, true);
      else if (key == "boundary")
        set_choice(cfg.model.boundary, raw, line, key, {"free", "periodic"});
      else if (key == "z")
        set_double(cfg.model.z, raw, line, key, 0.0, 1e9, true);
      else
        fail(line, "unknown key '" + key + "' in section [model]");
    } else if (section == "sampler") {
      if (key == "burn_in")
        set_u64(cfg.sampler.burn_in, raw, line, key, 0);
      else if (key == "thinning")
        set_u64(cfg.sampler.thinning, raw, line, key, 0);
      else if (key == "count")
        set_u64(cfg.sampler.count, raw, line, key, 1);
      else if (key == "p_insert")
        set_double(cfg.sampler.p_insert, raw, line, key, 0.0, 1.0);
      else if (key == "p_remove")
        set_double(cfg.sampler.p_remove, raw, line, key, 0.0, 1.0);
      else if (key == "p_displace")
        set_double(cfg.sampler.p_displace, raw, line, key, 0.0, 1.0);
      else if (key == "displace_sigma")
        set_double(cfg.sampler.displace_sigma, raw, line, key, 0.0, 1e6, true);
      else if (key == "max_particles")
        set_u64(cfg.sampler.max_particles, raw, line, key, 1, 1000000);
      else if (key == "seed")
        set_u64(cfg.sampler.seed, raw, line, key, 0);
      else
        fail(line, "unknown key '" + key + "' in section [sampler]");
    } else if (section == "dynamics") {
      if (key == "system")
        set_choice(cfg.dynamics.system, raw, line, key, {"gsd", "gsdad", "env", "coup"});
      else if (key == "dt")
        set_double(cfg.dynamics.dt, raw, line, key, 0.0, 1.0);
      else if (key == "steps")
        set_u64(cfg.dynamics.steps, raw, line, key, 0);
      else if (key == "stride")
        set_u64(cfg.dynamics.stride, raw, line, key, 1);
      else if (key == "r_rej")
        set_double(cfg.dynamics.r_rej, raw, line, key, 0.0, 1e9, true);
      else if (key == "clamp")
        set_double(cfg.dynamics.clamp, raw, line, key, 0.0, 1e9);
      else if (key == "wall")
        set_choice(cfg.dynamics.wall, raw, line, key, {"reflect", "wrap"});
      else if (key == "seed")
        set_u64(cfg.dynamics.seed, raw, line, key, 0);
      else
        fail(line, "unknown key '" + key + "' in section [dynamics]");
    } else if (section == "verify") {
      if (key == "identities") {
        auto items = split_list(raw);
        if (items.empty())
          fail(line, "value of 'identities' must be 'all' or a comma list");
        else
          cfg.verify.identities = items;
      } else if (key == "samples")
        set_u64(cfg.verify.samples, raw, line, key, 1000);
      else if (key == "seeds") {
        std::vector<std::uint64_t> seeds;
        bool bad = false;
        for (const auto& item : split_list(raw)) {
          std::uint64_t v;
          if (to_u64(item, line, key, v))
            seeds.push_back(v);
          else
            bad = true;
        }
        if (seeds.empty() && !bad)
          fail(line, "value of 'seeds' must be a non-empty comma list");
        if (!bad && !seeds.empty()) cfg.verify.seeds = seeds;
      } else if (key == "sign")
        set_choice(cfg.verify.sign, raw, line, key, {"auto", "plus", "minus"});
      else
        fail(line, "unknown key '" + key + "' in section [verify]");
    } else if (section == "output") {
      if (key == "dir")
        cfg.output.dir = raw;
      else if (key == "prefix") {
        if (raw.empty() || raw.find('/') != std::string::npos)
          fail(line, "value of 'prefix' must be a non-empty name without '/'");
        else
          cfg.output.prefix = raw;
      } else
        fail(line, "unknown key '" + key + "' in section [output]");
    }
  }

  void cross_checks() {
    const auto& s = cfg.sampler;
    if (std::abs(s.p_insert + s.p_remove + s.p_displace - 1.0) > 1e-9)
      fail(0, "sampler move probabilities must sum to 1 (got " +
                  std::to_string(s.p_insert + s.p_remove + s.p_displace) + ")");
    if (cfg.model.potential == "power" && cfg.model.exponent <= cfg.model.dim)
      fail(0, "power-law exponent must exceed the dimension for an integrable tail");
    // The separation guard must stay above the coincidence threshold of the
    // box, or every proposal would be rejected as ill-posed.
    if (cfg.dynamics.r_rej < 1e-9 * cfg.model.side)
      fail(0, "dynamics r_rej must be at least 1e-9 * side");
  }
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  Parser p;
  static const std::map<std::string, int> known_sections = {
      {"model", 0}, {"sampler", 1}, {"dynamics", 2}, {"verify", 3}, {"output", 4}};
  std::string section;
  bool section_known = false;
  std::istringstream in(text);
  std::string rawline;
  int line = 0;
  while (std::getline(in, rawline)) {
    ++line;
    std::string s = rawline;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        p.fail(line, "malformed section header: '" + trim(rawline) + "'");
        continue;
      }
      section = trim(s.substr(1, s.size() - 2));
      section_known = known_sections.count(section) > 0;
      if (!section_known) p.fail(line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      p.fail(line, "expected 'key = value': '" + s + "'");
      continue;
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      p.fail(line, "missing key before '='");
      continue;
    }
    if (section.empty()) {
      p.fail(line, "key '" + key + "' appears before any [section] header");
      continue;
    }
    if (!section_known) continue;  // the unknown section was already reported
    p.apply(section, key, value, line);
  }
  p.cross_checks();
  return ParseResult{std::move(p.cfg), std::move(p.errors)};
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[model]\n";
  out << "potential = " << c.model.potential << "\n";
  out << "c = " << format_double(c.model.c) << "\n";
  out << "prefactor = " << format_double(c.model.prefactor) << "\n";
  out << "exponent = " << format_double(c.model.exponent) << "\n";
  out << "dim = " << c.model.dim << "\n";
  out << "side = " << format_double(c.model.side) << "\n";
  out << "boundary = " << c.model.boundary << "\n";
  out << "z = " << format_double(c.model.z) << "\n";
  out << "\n[sampler]\n";
  out << "burn_in = " << c.sampler.burn_in << "\n";
  out << "thinning = " << c.sampler.thinning << "\n";
  out << "count = " << c.sampler.count << "\n";
  out << "p_insert = " << format_double(c.sampler.p_insert) << "\n";
  out << "p_remove = " << format_double(c.sampler.p_remove) << "\n";
  out << "p_displace = " << format_double(c.sampler.p_displace) << "\n";
  out << "displace_sigma = " << format_double(c.sampler.displace_sigma) << "\n";
  out << "max_particles = " << c.sampler.max_particles << "\n";
  out << "seed = " << c.sampler.seed << "\n";
  out << "\n[dynamics]\n";
  out << "system = " << c.dynamics.system << "\n";
  out << "dt = " << format_double(c.dynamics.dt) << "\n";
  out << "steps = " << c.dynamics.steps << "\n";
  out << "stride = " << c.dynamics.stride << "\n";
  out << "r_rej = " << format_double(c.dynamics.r_rej) << "\n";
  out << "clamp = " << format_double(c.dynamics.clamp) << "\n";
  out << "wall = " << c.dynamics.wall << "\n";
  out << "seed = " << c.dynamics.seed << "\n";
  out << "\n[verify]\n";
  out << "identities = ";
  for (std::size_t i = 0; i < c.verify.identities.size(); ++i)
    out << (i ? ", " : "") << c.verify.identities[i];
  out << "\n";
  out << "samples = " << c.verify.samples << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < c.verify.seeds.size(); ++i)
    out << (i ? ", " : "") << c.verify.seeds[i];
  out << "\n";
  out << "sign = " << c.verify.sign << "\n";
  out << "\n[output]\n";
  if (!c.output.dir.empty()) out << "dir = " << c.output.dir << "\n";
  out << "prefix = " << c.output.prefix << "\n";
  return out.str();
}

std::string format_errors(const std::vector<ConfigError>& errors) {
  std::ostringstream out;
  for (const auto& e : errors) {
    if (e.line > 0)
      out << "line " << e.line << ": " << e.message << "\n";
    else
      out << "config: " << e.message << "\n";
  }
  return out.str();
}

}  // namespace gibbsdyn
