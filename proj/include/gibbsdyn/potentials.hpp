// Radial pair potentials and integral-condition diagnostics.
//
// A potential is stored through its radial profile phi(r) and derivative
// phi'(r).  Values above a hard floor are treated as +infinity (hard core):
// the Boltzmann factor there is exactly zero, which both regularises
// integrands and gives samplers an unambiguous rejection rule.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "gibbsdyn/geometry.hpp"

namespace gibbsdyn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultHardFloor = 700.0;

// e^{-phi} with the convention e^{-inf} = 0 and no overflow for large |phi|.
inline double boltzmann(double phi) {
  if (phi == kInf) return 0.0;
  if (phi >= kDefaultHardFloor) return 0.0;
  if (phi <= -kDefaultHardFloor) return std::exp(kDefaultHardFloor);  // clamped
  return std::exp(-phi);
}

struct PairPotential {
  std::string name;
  double hard_floor = kDefaultHardFloor;
  // Radius below which phi is treated as +inf (phi(core_radius) == hard_floor
  // for monotone cores; 0 means no hard core).
  double core_radius = 0.0;
  // Large-r decay exponents: phi ~ r^-p_value, |phi'| ~ r^-p_grad.
  // +inf means faster than any power (e.g. identically zero tails).
  double tail_exponent_value = kInf;
  double tail_exponent_grad = kInf;
  bool identically_zero = false;

  std::function<double(double)> radial_value;  // phi(r), r > 0
  std::function<double(double)> radial_deriv;  // phi'(r), r > 0

  // phi(r) with the hard-core clipping applied; +inf inside the core or
  // above the floor.  r must be positive.
  double value_radial(double r) const {
    if (identically_zero) return 0.0;
    if (r <= core_radius) return kInf;
    double v = radial_value(r);
    if (v > hard_floor) return kInf;
    return v;
  }

  double deriv_radial(double r) const {
    if (identically_zero) return 0.0;
    return radial_deriv(r);
  }

  // phi at displacement x.  Throws SingularityError at x == 0.
  double value(const Vec& x) const {
    double r = x.norm();
    if (r == 0.0) {
      if (identically_zero) return 0.0;
      throw SingularityError("pair potential evaluated at zero separation");
    }
    return value_radial(r);
  }

  // grad phi at displacement x = phi'(|x|) * x/|x|.  Throws SingularityError
  // at x == 0.  Finite (possibly huge) inside the hard core.
  Vec gradient(const Vec& x) const {
    double r = x.norm();
    if (r == 0.0) {
      if (identically_zero) return Vec::zero(x.dim);
      throw SingularityError("pair-potential gradient evaluated at zero separation");
    }
    return (deriv_radial(r) / r) * x;
  }
};

// Lennard-Jones with a common amplitude on both powers:
//   phi(r) = c * (r^-12 - r^-6),  minimum -c/4 at r = 2^(1/6).
PairPotential make_lennard_jones(double c);

// The identically-zero potential (free gas).
PairPotential make_zero_potential();

// phi(r) = amplitude * r^-p, amplitude > 0, p > 0.  With p = 1, d = 3 this is
// a Coulomb-like repulsion whose interaction tail is not integrable.
PairPotential make_power_law(double amplitude, double p);

// ---------------------------------------------------------------------------
// Condition reports
// ---------------------------------------------------------------------------
enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct ConditionReport {
  std::string id;
  Verdict verdict = Verdict::inconclusive;
  std::map<std::string, double> estimates;
  std::string notes;
};

// Integrability of the Mayer function: finiteness of
//   int_{R^d} |e^{-phi(x)} - 1| dx,
// evaluated as an adaptive radial quadrature on [0, split_radius] plus an
// analytic power-law bound on the tail using the declared decay exponent.
ConditionReport check_integrability(const PairPotential& pot, int dim,
                                    double split_radius = 10.0);

// Finiteness of  int |grad phi|^{q'} e^{-phi} dx  for q' = 1 and q' = q.
// q must be >= 1.
ConditionReport check_dlq(const PairPotential& pot, int dim, double q,
                          double split_radius = 10.0);

// Empirical check of a gradient decay bound
//   |grad phi(x)|_max <= C |x|^{-alpha}  for |x| >= R,  alpha > dim + 1.
// Samples n log-spaced radii in [R, 100R]; reports the minimal constant C and
// the empirically fitted decay exponent, and fails if alpha overstates the
// observed decay by more than half a power or if alpha <= dim + 1.
ConditionReport check_tail_decay(const PairPotential& pot, int dim, double R,
                                 double alpha, int n_samples = 64);

// Randomised search for configurations of low energy per particle.  A
// sampling probe cannot certify a lower bound for all configurations, so the
// verdict is always `inconclusive`; the estimates record the worst ratio
// E(gamma)/|gamma| seen.
ConditionReport stability_probe(const PairPotential& pot, const Box& box,
                                int trials, int max_n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Quadrature helper (exposed for reuse and for direct testing)
// ---------------------------------------------------------------------------
struct QuadResult {
  double value = 0;
  bool converged = true;
};

// Adaptive Simpson integration of f on [a, b] to absolute tolerance tol.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth = 28);

// Surface area of the unit sphere in dimension d (2, 2*pi, 4*pi for d=1,2,3).
double unit_sphere_area(int dim);

}  // namespace gibbsdyn
