// Finite-volume Gibbs machinery: energies, a grand-canonical Metropolis
// sampler, and binned correlation-function estimators.
//
// The target law on the box Lambda is, sector by sector,
//   P(n points, dx_1..dx_n)  ~  (z^n / n!) prod_i u(x_i) e^{-E(x)} dx,
// where u(x) = e^{-phi(x)} weights each point by the pair potential evaluated
// at its displacement from the origin (a fixed external particle), and E is
// the pair energy plus the interaction with optional frozen boundary points.
#pragma once

#include <cstdint>
#include <vector>

#include "gibbsdyn/geometry.hpp"
#include "gibbsdyn/potentials.hpp"
#include "gibbsdyn/rng.hpp"

namespace gibbsdyn {

// ---------------------------------------------------------------------------
// Energies
// ---------------------------------------------------------------------------
struct EnergyModel {
  PairPotential pot;
  Box box;
  std::vector<Vec> boundary;  // frozen condition points (may be empty)

  // One-body weight u(x) = e^{-phi(x)} at the box displacement from origin.
  double one_body_phi(const Vec& x) const {
    if (pot.identically_zero) return 0.0;
    Vec d = box.from_origin(x);
    double r = d.norm();
    return r == 0.0 ? kInf : pot.value_radial(r);
  }
  double one_body_weight(const Vec& x) const { return boltzmann(one_body_phi(x)); }
};

// Sum of phi over unordered pairs of pts (box metric); +inf on any core
// overlap or coincident pair; 0 for fewer than two points.
double pair_energy(const EnergyModel& model, const std::vector<Vec>& pts);

// Sum of phi over ordered pairs (a, b) with a in A, b in B.
double interaction_energy(const EnergyModel& model, const std::vector<Vec>& a,
                          const std::vector<Vec>& b);

// pair_energy(pts) + interaction_energy(pts, boundary).
double conditional_energy(const EnergyModel& model, const std::vector<Vec>& pts);

// ---------------------------------------------------------------------------
// Proposals and O(n) energy differences
// ---------------------------------------------------------------------------
struct Proposal {
  enum class Kind { insert, remove, displace };
  Kind kind = Kind::insert;
  Vec position;   // insert: new point; displace: target position
  int index = -1; // remove / displace
};

// Energy difference E(gamma') - E(gamma) of applying the proposal, computed
// through spatial-index queries against cl (built from cfg; throws
// StaleStructureError on mismatch).  May return +inf (core overlap).
double delta_energy(const EnergyModel& model, const Configuration& cfg,
                    const CellList& cl, const Proposal& prop);

// ---------------------------------------------------------------------------
// Acceptance probabilities (pure functions, shared with the detailed-balance
// unit tests).  `u` denotes the one-body weight at the touched position.
// ---------------------------------------------------------------------------
double insert_acceptance(double z, double volume, std::size_t n_before, double u,
                         double delta_e);
double remove_acceptance(double z, double volume, std::size_t n_before, double u,
                         double delta_e);
double displace_acceptance(double phi_old, double phi_new, double delta_e);

// ---------------------------------------------------------------------------
// Grand-canonical Metropolis chain
// ---------------------------------------------------------------------------
struct SamplerParams {
  double z = 1.0;  // activity
  double p_insert = 1.0 / 3.0;
  double p_remove = 1.0 / 3.0;
  double p_displace = 1.0 / 3.0;  // probabilities must sum to 1
  double displace_sigma = 0.25;   // stddev of the Gaussian displacement
  std::uint64_t seed = 0;
  std::uint64_t burn_in = 20000;
  std::uint64_t thinning = 0;  // 0: choose from a pilot autocorrelation run
  std::size_t max_particles = 4096;  // hard cap (resource guard, not physics)
};

struct AcceptanceCounters {
  std::uint64_t proposed[3] = {0, 0, 0};  // insert, remove, displace
  std::uint64_t accepted[3] = {0, 0, 0};
};

class GcmcChain {
 public:
  GcmcChain(EnergyModel model, SamplerParams params);

  void step();
  void run(std::uint64_t steps);

  const std::vector<Vec>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  double cached_energy() const { return energy_; }
  double recompute_energy() const;  // fresh O(n^2) reference for invariants
  const AcceptanceCounters& counters() const { return counters_; }
  const EnergyModel& model() const { return model_; }

  Configuration snapshot() const;  // validated configuration

 private:
  void try_insert();
  void try_remove();
  void try_displace();
  void rebuild_index();

  EnergyModel model_;
  SamplerParams params_;
  std::vector<Vec> pts_;
  std::vector<double> one_body_phi_;
  double energy_ = 0;
  RngStream rng_;
  Configuration cfg_;   // mirrors pts_ (unchecked view for index queries)
  CellList cl_;
  AcceptanceCounters counters_;
};

struct EnsembleDiagnostics {
  double accept_insert = 0, accept_remove = 0, accept_displace = 0;
  double tau_count = 1;       // autocorrelation time of |gamma| across samples
  std::uint64_t thinning = 1; // chain steps between emitted samples
  double ess = 0;             // count / tau_count
};

struct Ensemble {
  std::vector<Configuration> samples;
  EnsembleDiagnostics diag;
};

// Burn in, pick a thinning stride (pilot run on the particle count when
// params.thinning == 0), and emit `count` configurations.
Ensemble sample_ensemble(const EnergyModel& model, const SamplerParams& params,
                         std::size_t count);

// ---------------------------------------------------------------------------
// Correlation-function estimators
// ---------------------------------------------------------------------------
// Binned correlation estimates normalised against the one-body reference
// measure u(x)dx (activity excluded), so for the free gas at activity z the
// first- and second-order estimates are flat at z and z^2.
//
// order 1: bins are slabs over the first coordinate in [-side/2, side/2].
// order 2: bins are separation shells r in [0, side/2] (box metric);
//          the estimate uses ordered pairs.
struct RhoEstimate {
  int order = 1;
  std::vector<double> edges;  // nbins + 1
  std::vector<double> value;  // per-bin estimate
  std::vector<double> se;     // per-bin standard error
  std::vector<double> denom;  // reference-measure mass per bin
};

RhoEstimate estimate_rho(const std::vector<Configuration>& samples,
                         const EnergyModel& model, int order, int nbins);

// int_Lambda u(x) dx (activity excluded).
double one_body_mass(const EnergyModel& model);

// Volume of {w in [-h,h]^d : |w| <= R}.
double clipped_ball_volume(int dim, double R, double h);

// Empirical Ruelle-type bound check: rho^(1) <= c_r and rho^(2) <= c_r^2
// within three standard errors, bin by bin.
ConditionReport ruelle_check(const RhoEstimate& rho1, const RhoEstimate& rho2,
                             double c_r);

}  // namespace gibbsdyn
