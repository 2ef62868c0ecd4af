#include "gibbsdyn/potentials.hpp"

#include <algorithm>
#include <vector>

#include "gibbsdyn/rng.hpp"

namespace gibbsdyn {

namespace {

// Radius where the (monotone near the origin) profile crosses the hard floor.
double solve_core_radius(const std::function<double(double)>& phi, double floor,
                         double lo, double hi) {
  // phi(lo) > floor > phi(hi); bisect to machine precision.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid) > floor)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PairPotential make_lennard_jones(double c) {
  if (!(c > 0) || !std::isfinite(c))
    throw std::invalid_argument("make_lennard_jones: amplitude must be positive");
  PairPotential p;
  p.name = "lennard_jones";
  p.radial_value = [c](double r) {
    double ir6 = 1.0 / (r * r * r * r * r * r);
    return c * (ir6 * ir6 - ir6);
  };
  p.radial_deriv = [c](double r) {
    double ir = 1.0 / r;
    double ir6 = ir * ir * ir * ir * ir * ir;
    // d/dr [c (r^-12 - r^-6)] = c (-12 r^-13 + 6 r^-7)
    return c * ir6 * ir * (6.0 - 12.0 * ir6);
  };
  p.tail_exponent_value = 6.0;
  p.tail_exponent_grad = 7.0;
  p.core_radius = solve_core_radius(p.radial_value, p.hard_floor, 1e-3, 1.0);
  return p;
}

PairPotential make_zero_potential() {
  PairPotential p;
  p.name = "zero";
  p.identically_zero = true;
  p.radial_value = [](double) { return 0.0; };
  p.radial_deriv = [](double) { return 0.0; };
  return p;
}

PairPotential make_power_law(double amplitude, double pexp) {
  if (!(amplitude > 0) || !(pexp > 0))
    throw std::invalid_argument("make_power_law: amplitude and exponent must be positive");
  PairPotential p;
  p.name = "power_law";
  p.radial_value = [amplitude, pexp](double r) { return amplitude * std::pow(r, -pexp); };
  p.radial_deriv = [amplitude, pexp](double r) {
    return -amplitude * pexp * std::pow(r, -pexp - 1.0);
  };
  p.tail_exponent_value = pexp;
  p.tail_exponent_grad = pexp + 1.0;
  p.core_radius = std::pow(amplitude / p.hard_floor, 1.0 / pexp);
  return p;
}

double unit_sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default: throw std::invalid_argument("unit_sphere_area: dimension must be 1..3");
  }
}

namespace {

struct SimpsonCtx {
  const std::function<double(double)>* f;
  double tol;
  int max_depth;
  bool converged;
};

double simpson_rec(SimpsonCtx& ctx, double a, double b, double fa, double fm,
                   double fb, double whole, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = (*ctx.f)(lm), frm = (*ctx.f)(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * ctx.tol || depth >= ctx.max_depth) {
    if (depth >= ctx.max_depth && std::abs(delta) > 15.0 * ctx.tol)
      ctx.converged = false;
    return left + right + delta / 15.0;
  }
  return simpson_rec(ctx, a, m, fa, flm, fm, left, depth + 1) +
         simpson_rec(ctx, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a,
                            double b, double tol, int max_depth) {
  SimpsonCtx ctx{&f, tol, max_depth, true};
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double v = simpson_rec(ctx, a, b, fa, fm, fb, whole, 0);
  return {v, ctx.converged};
}

ConditionReport check_integrability(const PairPotential& pot, int dim,
                                    double split_radius) {
  ConditionReport rep;
  rep.id = "integrability";
  const double S = unit_sphere_area(dim);
  const double R0 = split_radius;

  auto integrand = [&](double r) {
    // Evaluate the continuous limit at the origin (r^0 = 1 in d = 1, where a
    // hard core keeps |e^{-phi} - 1| at 1); a spurious jump to zero at r = 0
    // would stall the adaptive refinement.
    double rr = std::max(r, 1e-300);
    double v = std::abs(boltzmann(pot.value_radial(rr)) - 1.0) * std::pow(rr, dim - 1);
    return std::min(v, 1e300);
  };
  QuadResult near = adaptive_simpson(integrand, 0.0, R0, 1e-10);
  double near_integral = S * near.value;

  // Tail bound from the declared decay exponent: for r >= R0,
  // |e^{-phi} - 1| <= |phi| e^{|phi|} <= A r^{-p} e^{|phi(R0)|}.
  const double p = pot.tail_exponent_value;
  double tail = 0.0;
  bool tail_finite = true;
  if (!pot.identically_zero && p != kInf) {
    double phi0 = pot.value_radial(R0);
    if (phi0 == kInf) {
      tail_finite = false;  // hard core reaching the split radius: no bound
    } else {
      double A = std::abs(phi0) * std::pow(R0, p);
      if (p > dim) {
        tail = S * A * std::exp(std::abs(phi0)) * std::pow(R0, dim - p) / (p - dim);
      } else {
        tail_finite = false;
      }
    }
  }

  rep.estimates["near_integral"] = near_integral;
  rep.estimates["tail_bound"] = tail_finite ? tail : kInf;
  rep.estimates["total"] = tail_finite ? near_integral + tail : kInf;
  rep.estimates["tail_exponent"] = p;

  if (!tail_finite) {
    rep.verdict = Verdict::fail;
    rep.notes = "tail decay exponent does not exceed the dimension; the Mayer "
                "integral diverges";
  } else if (near_integral > 1e50) {
    rep.verdict = Verdict::fail;
    rep.notes = "near-field integral diverges (unbounded attraction)";
  } else if (!near.converged) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "radial quadrature did not converge";
  } else {
    rep.verdict = Verdict::pass;
    rep.notes = "Mayer integral finite";
  }
  return rep;
}

ConditionReport check_dlq(const PairPotential& pot, int dim, double q,
                          double split_radius) {
  if (!(q >= 1.0))
    throw std::invalid_argument("check_dlq: q must be >= 1");
  ConditionReport rep;
  rep.id = "gradient_integrability";
  const double S = unit_sphere_area(dim);
  const double R0 = split_radius;

  bool all_finite = true;
  bool all_converged = true;
  for (double qp : {1.0, q}) {
    auto integrand = [&](double r) {
      if (r <= 0) return 0.0;
      double phi = pot.value_radial(r);
      if (phi == kInf) return 0.0;  // Boltzmann factor is exactly zero inside the core
      double g = std::abs(pot.deriv_radial(r));
      double v = std::pow(g, qp) * boltzmann(phi) * std::pow(r, dim - 1);
      return std::min(v, 1e300);
    };
    QuadResult near = adaptive_simpson(integrand, 0.0, R0, 1e-10);

    const double pg = pot.tail_exponent_grad;
    double tail = 0.0;
    bool tail_finite = true;
    if (!pot.identically_zero && pg != kInf) {
      double phi0 = pot.value_radial(R0);
      if (phi0 == kInf) {
        tail_finite = false;
      } else {
        double Ag = std::abs(pot.deriv_radial(R0)) * std::pow(R0, pg);
        if (pg * qp > dim) {
          tail = S * std::pow(Ag, qp) * std::exp(std::abs(phi0)) *
                 std::pow(R0, dim - pg * qp) / (pg * qp - dim);
        } else {
          tail_finite = false;
        }
      }
    }
    std::string key = qp == 1.0 ? "integral_q1" : "integral_q";
    rep.estimates[key] = tail_finite ? S * near.value + tail : kInf;
    all_finite = all_finite && tail_finite && (S * near.value < 1e50);
    all_converged = all_converged && near.converged;
  }
  rep.estimates["q"] = q;

  if (!all_finite) {
    rep.verdict = Verdict::fail;
    rep.notes = "a gradient moment integral diverges";
  } else if (!all_converged) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "radial quadrature did not converge";
  } else {
    rep.verdict = Verdict::pass;
    rep.notes = "gradient moments finite for exponents 1 and q";
  }
  return rep;
}

ConditionReport check_tail_decay(const PairPotential& pot, int dim, double R,
                                 double alpha, int n_samples) {
  if (!(R > 0) || n_samples < 8)
    throw std::invalid_argument("check_tail_decay: need R > 0 and n_samples >= 8");
  ConditionReport rep;
  rep.id = "tail_decay";

  // |grad phi|_max along a coordinate axis equals |phi'(r)| (radial profile).
  std::vector<double> rs(static_cast<std::size_t>(n_samples));
  std::vector<double> gs(rs.size());
  const double logR = std::log(R), logHi = std::log(100.0 * R);
  bool all_zero = true;
  double C = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    double t = static_cast<double>(i) / static_cast<double>(rs.size() - 1);
    rs[i] = std::exp(logR + t * (logHi - logR));
    gs[i] = std::abs(pot.deriv_radial(rs[i]));
    if (gs[i] > 0) all_zero = false;
    C = std::max(C, gs[i] * std::pow(rs[i], alpha));
  }
  rep.estimates["constant"] = C;
  rep.estimates["alpha"] = alpha;

  if (all_zero) {
    rep.verdict = alpha > dim + 1 ? Verdict::pass : Verdict::fail;
    rep.notes = "gradient vanishes on the sampled range";
    rep.estimates["alpha_empirical"] = kInf;
    return rep;
  }

  // Fit -d(log g)/d(log r) by least squares over the outer decade, where the
  // asymptotic power dominates.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i] < 10.0 * R || gs[i] <= 0) continue;
    double x = std::log(rs[i]), y = std::log(gs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 3) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "too few usable samples in the fitting window";
    return rep;
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double alpha_emp = -slope;
  rep.estimates["alpha_empirical"] = alpha_emp;

  if (!(alpha > dim + 1)) {
    rep.verdict = Verdict::fail;
    rep.notes = "requested exponent does not exceed dimension + 1";
  } else if (alpha > alpha_emp + 0.5) {
    rep.verdict = Verdict::fail;
    rep.notes = "requested exponent overstates the observed decay";
  } else {
    rep.verdict = Verdict::pass;
    rep.notes = "decay bound holds on the sampled range";
  }
  return rep;
}

ConditionReport stability_probe(const PairPotential& pot, const Box& box,
                                int trials, int max_n, std::uint64_t seed) {
  if (trials < 1 || max_n < 1)
    throw std::invalid_argument("stability_probe: trials and max_n must be positive");
  ConditionReport rep;
  rep.id = "stability_probe";
  RngStream rng(seed);
  double worst_ratio = kInf;
  int finite_trials = 0;
  for (int t = 0; t < trials; ++t) {
    int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_n)));
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Vec x(box.dim);
      for (int k = 0; k < box.dim; ++k) x[k] = rng.uniform(-box.half(), box.half());
      pts.push_back(x);
    }
    double e = 0;
    bool finite = true;
    for (std::size_t i = 0; i + 1 < pts.size() && finite; ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        Vec d = box.delta(pts[i], pts[j]);
        double r = d.norm();
        double v = r == 0.0 ? kInf : pot.value_radial(r);
        if (v == kInf) { finite = false; break; }
        e += v;
      }
    if (!finite) continue;
    ++finite_trials;
    worst_ratio = std::min(worst_ratio, e / n);
  }
  rep.estimates["worst_energy_per_particle"] = worst_ratio;
  rep.estimates["finite_trials"] = finite_trials;
  rep.estimates["trials"] = trials;
  rep.verdict = Verdict::inconclusive;
  rep.notes = "randomised probe only: no finite search certifies a stability "
              "bound for all configurations";
  return rep;
}

}  // namespace gibbsdyn
