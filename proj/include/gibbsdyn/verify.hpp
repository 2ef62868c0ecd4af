// Monte Carlo hypothesis tests for the structural identities of the
// interacting dynamics: integration by parts against sampled ensembles,
// Dirichlet-form/generator duality, generator symmetry, invariance of the
// sampled measure under the SDE flow, and the martingale property along
// simulated paths.  Each test reduces an identity to per-sample residuals of
// a quantity with exact mean zero and reports a 3-sigma verdict.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbsdyn/calculus.hpp"
#include "gibbsdyn/dynamics.hpp"
#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/stats.hpp"

namespace gibbsdyn {

// ---------------------------------------------------------------------------
// First-order integration by parts:
//   E[ dd_v F * G + F * dd_v G + F * G * B_v ] = 0,
// with dd_v the directional derivative along the vector field and B_v the
// divergence term under sign convention s.
// Requires >= 1000 samples (std::invalid_argument otherwise); an identically
// zero integrand yields an inconclusive report.
// ---------------------------------------------------------------------------
MCTestReport test_ibp(const CylinderFunction& F, const CylinderFunction& G,
                      const VectorField& v, const Ensemble& ensemble,
                      const PairPotential& pot, DriftSign s);

// ---------------------------------------------------------------------------
// Translation integration by parts:
//   E[ (T_F, T_G) + extra(F) * G ] = 0,
// where T denotes the translation gradient and extra(F) is the part the
// moving-frame generator adds on top of the fixed-frame one,
//   sum_ij d2_ij g (T_i, T_j) + sum_j d_j g (<lap f_j, gamma> - (S, T_j)),
// with T_i = <grad f_i, gamma> and S = sum_x grad phi(x).  The one-body sign
// here is fixed by the frame change, so the test takes no sign argument.
// ---------------------------------------------------------------------------
MCTestReport test_ibp_translation(const CylinderFunction& F, const CylinderFunction& G,
                                  const Ensemble& ensemble, const PairPotential& pot);

// The extra part itself, computed directly from the displayed formula
// (deliberately not via a difference of the two generator evaluators, so the
// translation test is an independent check on them).
double moving_frame_extra(const PairPotential& pot, const CylinderFunction& f,
                          const Configuration& gamma);

// ---------------------------------------------------------------------------
// Dirichlet-form / generator duality:  E_form(F, G) = -E[L_form F * G].
// The residual is the per-sample carre-du-champ plus L F * G.
//
//   gsdad: carre = sum_x (grad_x F, grad_x G)
//   env:   carre = sum_x (grad_x F, grad_x G) + (T_F, T_G)
//   coup:  product functionals f(xi) F(gamma); the tagged coordinate is
//          integrated uniformly over the box (volume factor included), so f
//          and g must be supported inside the box.
// ---------------------------------------------------------------------------
enum class DirichletForm { gsdad, env, coup };
const char* to_string(DirichletForm form);

// gsdad / env (form == coup throws std::invalid_argument; use the
// tagged-functional overload).
MCTestReport test_dirichlet(DirichletForm form, const CylinderFunction& F,
                            const CylinderFunction& G, const Ensemble& ensemble,
                            const PairPotential& pot, DriftSign s);

// coup: xi draws are seeded for reproducibility.
MCTestReport test_dirichlet(const TaggedCylinderFunction& F,
                            const TaggedCylinderFunction& G, const Ensemble& ensemble,
                            const PairPotential& pot, DriftSign s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Generator symmetry:  E[ L F * G - F * L G ] = 0.
// ---------------------------------------------------------------------------
MCTestReport test_symmetry(DirichletForm form, const CylinderFunction& F,
                           const CylinderFunction& G, const Ensemble& ensemble,
                           const PairPotential& pot, DriftSign s);
MCTestReport test_symmetry(const TaggedCylinderFunction& F,
                           const TaggedCylinderFunction& G, const Ensemble& ensemble,
                           const PairPotential& pot, DriftSign s, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Invariance under the SDE flow.  Each ensemble sample seeds one path of
// n_steps integrator steps; the report compares the sample mean of the
// observable at time T = n_steps * dt against time 0 (paired differences)
// and likewise for the running time-average along the path.  Both must sit
// within the z threshold for a pass; the endpoint difference is the primary
// estimate and the time-average z is recorded in the metadata.
//
// For the coupled system the tagged position is drawn uniformly in the box
// (per-path substream of `seed`); other systems take the samples as-is.
// ---------------------------------------------------------------------------
using StateObservable = std::function<double(const SDEState&)>;

StateObservable observe(const CylinderFunction& F);
StateObservable observe(const TaggedCylinderFunction& F);

MCTestReport test_invariance(const StateObservable& F, System system,
                             const Ensemble& ensemble, const PairPotential& pot,
                             const IntegratorParams& params, std::uint64_t n_steps,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Martingale property.  Along each path started from an ensemble sample,
//   M_t = G(X_t) - G(X_0) - int_0^t L G(X_u) du
// has mean zero at every t; the time integral is a trapezoid sum on the
// integrator's own step grid.  One report per checkpoint time (rounded to
// the nearest step).  Non-finite residuals fail the report outright.
// Systems: gsdad and env take a cylinder functional, coup the tagged
// overload; gsd has no generator in the library and throws.
// ---------------------------------------------------------------------------
std::vector<MCTestReport> test_martingale(const CylinderFunction& G, System system,
                                          const Ensemble& ensemble,
                                          const PairPotential& pot, DriftSign s,
                                          const IntegratorParams& params,
                                          const std::vector<double>& checkpoints,
                                          std::uint64_t seed);
std::vector<MCTestReport> test_martingale(const TaggedCylinderFunction& G,
                                          const Ensemble& ensemble,
                                          const PairPotential& pot, DriftSign s,
                                          const IntegratorParams& params,
                                          const std::vector<double>& checkpoints,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Empirical adjudication of the one-body drift sign: run the first-order
// integration-by-parts test under both conventions and keep the one that
// passes.  Throws SignResolutionError when both pass (the sign term carries
// no weight: free potential, or a field orthogonal to the force) or both
// fail (an implementation-bug indicator).
// ---------------------------------------------------------------------------
struct SignResolution {
  DriftSign resolved = DriftSign::minus;
  MCTestReport plus_report;
  MCTestReport minus_report;
};

class SignResolutionError : public std::runtime_error {
 public:
  enum class Reason { both_pass, both_fail };
  SignResolutionError(Reason r, const std::string& msg)
      : std::runtime_error(msg), reason(r) {}
  Reason reason;
};

// Custom probes (the fields determine what the test can see).
SignResolution resolve_sign_conventions(const CylinderFunction& F,
                                        const CylinderFunction& G,
                                        const VectorField& v, const Ensemble& ensemble,
                                        const PairPotential& pot);
// Standard probes built from the ensemble's box.
SignResolution resolve_sign_conventions(const Ensemble& ensemble,
                                        const PairPotential& pot);

}  // namespace gibbsdyn
