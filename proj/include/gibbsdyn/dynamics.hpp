// Euler-Maruyama integration of the four interacting-diffusion systems and
// the coordinate change between the fixed and the moving (tagged) frame.
//
// System tags:
//   gsd    - interacting gradient diffusion, pair forces only
//   gsdad  - gsd plus the one-body drift of a particle pinned at the origin
//   env    - the environment seen from the moving tagged particle
//            (relative coordinates; correlated noise increments)
//   coup   - the coupled pair (tagged position xi, environment configuration)
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbsdyn/geometry.hpp"
#include "gibbsdyn/potentials.hpp"
#include "gibbsdyn/rng.hpp"

namespace gibbsdyn {

enum class System { gsd, gsdad, env, coup };

const char* to_string(System s);
System parse_system(const std::string& tag);  // std::invalid_argument on bad tag

struct IntegratorParams {
  double dt = 1e-4;
  // Reject a proposed step that brings particles (or, in the moving frame, a
  // particle and the origin) closer than this.  Default: half the
  // Lennard-Jones minimum distance 2^(1/6).
  double r_rej = 0.5 * 1.122462048309373;
  double clamp = 0;  // 0: no drift clamp; otherwise max drift magnitude
  enum class Wall { reflect, wrap } wall = Wall::reflect;
  std::uint64_t seed = 0;
};

struct SDEState {
  Configuration config;
  std::optional<Vec> xi;  // tagged position (coup only)
  double t = 0;
  RngStream rng;
  std::uint64_t steps = 0;
  std::uint64_t rejections = 0;
  bool rejection_warning = false;  // set when a 1000-step window rejects > 20%
  std::uint64_t window_steps = 0;
  std::uint64_t window_rejections = 0;
};

// Build a state; `coup` requires a tagged position (std::invalid_argument
// otherwise), the other systems must not carry one.
SDEState make_sde_state(System system, Configuration config, std::uint64_t seed,
                        std::optional<Vec> xi = std::nullopt);

// ---------------------------------------------------------------------------
// Drifts.  All throw CoreOverlapError when two particles (or a particle and
// the origin where the origin interacts) sit within the potential's hard
// core, and SingularityError at exactly zero displacement.
// ---------------------------------------------------------------------------
// b_i = -sum_{j != i} grad phi(x_i - x_j)
std::vector<Vec> drift_gsd(const PairPotential& pot, const Configuration& cfg);
// b_i = drift_gsd_i - grad phi(x_i)
std::vector<Vec> drift_gsdad(const PairPotential& pot, const Configuration& cfg);
// b_i = drift_gsdad_i - sum_j grad phi(y_j)   (common term computed once)
std::vector<Vec> drift_env(const PairPotential& pot, const Configuration& cfg);

// One Euler-Maruyama step in place.  Proposals violating the r_rej
// separation (pairwise, and to the origin for gsdad/env/coup) or failing a
// wall reflection are rejected: the state is unchanged except that time still
// advances and the rejection is counted, so time grids stay aligned across an
// ensemble.  Never throws for in-contract states.
void step(System system, const PairPotential& pot, SDEState& state,
          const IntegratorParams& params);

// ---------------------------------------------------------------------------
// Frame transform: tagged index k becomes the origin.
//   xi = x_k,  y_i = x_i - x_k (remaining points, order preserved)
// In a periodic box differences are wrapped; in a free box the relative
// coordinates may leave the nominal box, which is legal for environment
// configurations (only simplicity is enforced).
// ---------------------------------------------------------------------------
std::pair<Vec, Configuration> to_environment_frame(const Configuration& cfg,
                                                   int tagged_index);
Configuration from_environment_frame(const Vec& xi, const Configuration& env);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------
struct Frame {
  double t = 0;
  std::optional<Vec> xi;
  std::vector<Vec> points;
};

struct Trajectory {
  System system = System::gsd;
  Box box;
  double dt = 0;
  std::uint64_t stride = 1;
  std::uint64_t seed = 0;
  std::string potential;  // descriptor for file headers
  std::vector<Frame> frames;
  std::uint64_t total_steps = 0;
  std::uint64_t rejections = 0;
  bool rejection_warning = false;
};

using StepObserver = std::function<void(const SDEState&)>;

// Record the initial state, then every stride-th step and the final step.
// n_steps must be >= 1.  Deterministic for a fixed initial state and params.
Trajectory run_trajectory(System system, const PairPotential& pot, SDEState state,
                          const IntegratorParams& params, std::uint64_t n_steps,
                          std::uint64_t stride, const StepObserver& observer = {});

// The tagged-particle path of a coupled trajectory (std::invalid_argument for
// any other system tag).
std::vector<Vec> tagged_projection(const Trajectory& traj);

}  // namespace gibbsdyn
