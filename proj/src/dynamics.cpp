#include "gibbsdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbsdyn/calculus.hpp"

namespace gibbsdyn {

const char* to_string(System s) {
  switch (s) {
    case System::gsd: return "gsd";
    case System::gsdad: return "gsdad";
    case System::env: return "env";
    case System::coup: return "coup";
  }
  return "?";
}

System parse_system(const std::string& tag) {
  if (tag == "gsd") return System::gsd;
  if (tag == "gsdad") return System::gsdad;
  if (tag == "env") return System::env;
  if (tag == "coup") return System::coup;
  throw std::invalid_argument("unknown system tag: " + tag);
}

SDEState make_sde_state(System system, Configuration config, std::uint64_t seed,
                        std::optional<Vec> xi) {
  if (system == System::coup && !xi)
    throw std::invalid_argument("make_sde_state: coupled system needs a tagged position");
  if (system != System::coup && xi)
    throw std::invalid_argument("make_sde_state: only the coupled system carries a tagged position");
  SDEState st;
  st.config = std::move(config);
  st.xi = xi;
  st.rng = RngStream(substream_seed(seed, 0x5de));
  return st;
}

// ---------------------------------------------------------------------------
// Drifts
// ---------------------------------------------------------------------------
namespace {

// grad phi at displacement d, with hard-core and singularity policing.
Vec pair_force(const PairPotential& pot, const Vec& d) {
  double r = d.norm();
  if (r == 0.0) throw SingularityError("drift: zero separation");
  if (pot.core_radius > 0 && r <= pot.core_radius)
    throw CoreOverlapError("drift: separation inside the hard core");
  return pot.gradient(d);
}

}  // namespace

std::vector<Vec> drift_gsd(const PairPotential& pot, const Configuration& cfg) {
  const auto& pts = cfg.points;
  std::vector<Vec> b(pts.size(), Vec::zero(cfg.box.dim));
  if (pot.identically_zero) return b;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      // force on i from j: -grad phi(x_i - x_j); reaction is its negative
      Vec f = pair_force(pot, cfg.box.delta(pts[j], pts[i]));
      b[i] -= f;
      b[j] += f;
    }
  return b;
}

std::vector<Vec> drift_gsdad(const PairPotential& pot, const Configuration& cfg) {
  std::vector<Vec> b = drift_gsd(pot, cfg);
  if (pot.identically_zero) return b;
  for (std::size_t i = 0; i < b.size(); ++i)
    b[i] -= pair_force(pot, cfg.box.from_origin(cfg.points[i]));
  return b;
}

std::vector<Vec> drift_env(const PairPotential& pot, const Configuration& cfg) {
  std::vector<Vec> b = drift_gsdad(pot, cfg);
  if (pot.identically_zero) return b;
  Vec common = Vec::zero(cfg.box.dim);
  for (const auto& y : cfg.points) common += pair_force(pot, cfg.box.from_origin(y));
  for (auto& bi : b) bi -= common;
  return b;
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------
namespace {

void clamp_drift(std::vector<Vec>& b, double clamp) {
  if (clamp <= 0) return;
  for (auto& v : b) {
    double n = v.norm();
    if (n > clamp) v *= clamp / n;
  }
}

// Reflect one coordinate across the box walls.  Returns false when the
// proposal is so far out that a single fold cannot bring it back.
bool reflect_into(double& x, double half) {
  if (x < -half) x = -2.0 * half - x;
  else if (x > half) x = 2.0 * half - x;
  return x >= -half && x <= half;
}

}  // namespace

void step(System system, const PairPotential& pot, SDEState& state,
          const IntegratorParams& params) {
  const Box& box = state.config.box;
  const int dim = box.dim;
  const std::size_t n = state.config.points.size();
  if (!(params.dt >= 0)) throw std::invalid_argument("step: dt must be >= 0");
  if (params.r_rej < box.r_distinct())
    throw std::invalid_argument("step: rejection radius below the distinctness radius");
  if ((system == System::coup) != state.xi.has_value())
    throw std::invalid_argument("step: tagged position does not match the system tag");

  const bool moving_frame = system == System::env || system == System::coup;
  const bool origin_active = system != System::gsd;

  // Drift at the current state.
  std::vector<Vec> b;
  switch (system) {
    case System::gsd: b = drift_gsd(pot, state.config); break;
    case System::gsdad: b = drift_gsdad(pot, state.config); break;
    case System::env:
    case System::coup: b = drift_env(pot, state.config); break;
  }
  Vec tagged_drift = Vec::zero(dim);
  if (system == System::coup && !pot.identically_zero)
    for (const auto& y : state.config.points)
      tagged_drift += pot.gradient(box.from_origin(y));
  clamp_drift(b, params.clamp);
  if (params.clamp > 0) {
    double tn = tagged_drift.norm();
    if (tn > params.clamp) tagged_drift *= params.clamp / tn;
  }

  // Noise, in a fixed draw order for reproducibility.  The moving frame
  // shares one extra gaussian across all particles.
  const double root = std::sqrt(2.0 * params.dt);
  Vec zeta1 = Vec::zero(dim);
  if (moving_frame)
    for (int k = 0; k < dim; ++k) zeta1[k] = state.rng.normal();
  std::vector<Vec> prop(n, Vec::zero(dim));
  for (std::size_t i = 0; i < n; ++i) {
    Vec zi(dim);
    for (int k = 0; k < dim; ++k) zi[k] = state.rng.normal();
    Vec noise = moving_frame ? zi - zeta1 : zi;
    prop[i] = state.config.points[i] + params.dt * b[i] + root * noise;
  }
  Vec xi_prop = Vec::zero(dim);
  if (system == System::coup)
    xi_prop = *state.xi + params.dt * tagged_drift + root * zeta1;

  auto finish = [&](bool accepted, const std::vector<Vec>& pts, const Vec& xi) {
    if (accepted) {
      state.config.points = pts;
      if (system == System::coup) state.xi = xi;
    } else {
      ++state.rejections;
      ++state.window_rejections;
    }
    state.t += params.dt;
    ++state.steps;
    ++state.window_steps;
    if (state.window_steps >= 1000) {
      if (state.window_rejections * 5 > state.window_steps)
        state.rejection_warning = true;
      state.window_steps = 0;
      state.window_rejections = 0;
    }
  };

  // Walls.
  bool ok = true;
  for (auto& p : prop) {
    if (params.wall == IntegratorParams::Wall::wrap) {
      p = box.wrap(p);
    } else {
      for (int k = 0; k < dim && ok; ++k) ok = reflect_into(p[k], box.half());
    }
    if (!ok) break;
  }
  if (ok && system == System::coup) {
    if (params.wall == IntegratorParams::Wall::wrap) {
      xi_prop = box.wrap(xi_prop);
    } else {
      for (int k = 0; k < dim && ok; ++k) ok = reflect_into(xi_prop[k], box.half());
    }
  }

  // Separation constraints.
  if (ok) {
    for (std::size_t i = 0; ok && i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (box.distance(prop[i], prop[j]) < params.r_rej) {
          ok = false;
          break;
        }
    if (ok && origin_active)
      for (const auto& p : prop)
        if (box.from_origin(p).norm() < params.r_rej) {
          ok = false;
          break;
        }
  }
  finish(ok, prop, xi_prop);
}

// ---------------------------------------------------------------------------
// Frame transform
// ---------------------------------------------------------------------------
std::pair<Vec, Configuration> to_environment_frame(const Configuration& cfg,
                                                   int tagged_index) {
  if (tagged_index < 0 || tagged_index >= static_cast<int>(cfg.points.size()))
    throw std::invalid_argument("to_environment_frame: tagged index out of range");
  const Vec xi = cfg.points[static_cast<std::size_t>(tagged_index)];
  std::vector<Vec> rel;
  rel.reserve(cfg.points.size() - 1);
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    if (static_cast<int>(i) == tagged_index) continue;
    rel.push_back(cfg.box.delta(xi, cfg.points[i]));
  }
  if (cfg.box.mode == BoundaryMode::periodic)
    return {xi, make_configuration(cfg.box, std::move(rel))};
  // Free box: relative coordinates may leave the nominal box; enforce only
  // simplicity.
  if (min_pair_distance(cfg.box, rel) < cfg.box.r_distinct())
    throw std::invalid_argument("to_environment_frame: coincident relative points");
  return {xi, unchecked_configuration(cfg.box, std::move(rel))};
}

Configuration from_environment_frame(const Vec& xi, const Configuration& env) {
  std::vector<Vec> pts;
  pts.reserve(env.points.size() + 1);
  pts.push_back(xi);
  for (const auto& y : env.points) pts.push_back(y + xi);
  if (env.box.mode == BoundaryMode::periodic)
    return make_configuration(env.box, std::move(pts));
  if (min_pair_distance(env.box, pts) < env.box.r_distinct())
    throw std::invalid_argument("from_environment_frame: coincident points");
  return unchecked_configuration(env.box, std::move(pts));
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------
Trajectory run_trajectory(System system, const PairPotential& pot, SDEState state,
                          const IntegratorParams& params, std::uint64_t n_steps,
                          std::uint64_t stride, const StepObserver& observer) {
  if (n_steps < 1) throw std::invalid_argument("run_trajectory: need at least one step");
  if (stride < 1) throw std::invalid_argument("run_trajectory: stride must be >= 1");

  Trajectory traj;
  traj.system = system;
  traj.box = state.config.box;
  traj.dt = params.dt;
  traj.stride = stride;
  traj.seed = params.seed;
  traj.potential = pot.name;

  auto record = [&]() {
    traj.frames.push_back(Frame{state.t, state.xi, state.config.points});
  };
  record();
  for (std::uint64_t s = 1; s <= n_steps; ++s) {
    step(system, pot, state, params);
    if (observer) observer(state);
    if (s % stride == 0 || s == n_steps) record();
  }
  traj.total_steps = state.steps;
  traj.rejections = state.rejections;
  traj.rejection_warning = state.rejection_warning;
  return traj;
}

std::vector<Vec> tagged_projection(const Trajectory& traj) {
  if (traj.system != System::coup)
    throw std::invalid_argument("tagged_projection: trajectory is not from the coupled system");
  std::vector<Vec> path;
  path.reserve(traj.frames.size());
  for (const auto& f : traj.frames) {
    if (!f.xi) throw std::invalid_argument("tagged_projection: frame lacks a tagged position");
    path.push_back(*f.xi);
  }
  return path;
}

}  // namespace gibbsdyn
