#include "gibbsdyn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gibbsdyn/probes.hpp"

namespace gibbsdyn {

namespace {

void require_samples(const Ensemble& ens, std::size_t minimum = 1000) {
  if (ens.samples.size() < minimum)
    throw std::invalid_argument("verify: ensemble too small (need >= " +
                                std::to_string(minimum) + " samples)");
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

// Per-point carre du champ sum_x (grad_x F, grad_x G).
double carre_fixed(const CylinderFunction& F, const CylinderFunction& G,
                   const Configuration& gamma) {
  double out = 0;
  for (int k = 0; k < static_cast<int>(gamma.points.size()); ++k)
    out += dot(config_gradient(F, gamma, k), config_gradient(G, gamma, k));
  return out;
}

// Uniform draw in the box from a dedicated stream.
Vec uniform_in_box(const Box& box, RngStream& rng) {
  Vec x(box.dim);
  for (int k = 0; k < box.dim; ++k) x[k] = rng.uniform(-box.half(), box.half());
  return x;
}

// Carre du champ of the coupled process for product functionals, read off
// the noise structure: the environment channels contribute
// f g sum_x (grad_x F, grad_x G) and the shared tagged channel contributes
// (f T_F - F grad f, g T_G - G grad g).
double carre_coupled(const TaggedCylinderFunction& F, const TaggedCylinderFunction& G,
                     const Vec& xi, const Configuration& gamma) {
  const double f = F.tagged.value(xi), g = G.tagged.value(xi);
  const double Fv = F.env.value(gamma), Gv = G.env.value(gamma);
  const Vec gf = F.tagged.gradient(xi), gg = G.tagged.gradient(xi);
  const Vec tF = translation_gradient(F.env, gamma);
  const Vec tG = translation_gradient(G.env, gamma);
  return f * g * carre_fixed(F.env, G.env, gamma) +
         dot(f * tF - Fv * gf, g * tG - Gv * gg);
}

void annotate(MCTestReport& rep, const char* key, const std::string& value) {
  rep.meta[key] = value;
}

}  // namespace

const char* to_string(DirichletForm form) {
  switch (form) {
    case DirichletForm::gsdad: return "gsdad";
    case DirichletForm::env: return "env";
    case DirichletForm::coup: return "coup";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Integration by parts
// ---------------------------------------------------------------------------
MCTestReport test_ibp(const CylinderFunction& F, const CylinderFunction& G,
                      const VectorField& v, const Ensemble& ensemble,
                      const PairPotential& pot, DriftSign s) {
  require_samples(ensemble);
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples) {
    double r = directional_derivative(F, v, gamma) * G.value(gamma) +
               F.value(gamma) * directional_derivative(G, v, gamma) +
               F.value(gamma) * G.value(gamma) * divergence_term(pot, v, gamma, s);
    res.push_back(r);
  }
  MCTestReport rep = make_mc_report("ibp", res);
  annotate(rep, "sign", to_string(s));
  return rep;
}

double moving_frame_extra(const PairPotential& pot, const CylinderFunction& f,
                          const Configuration& gamma) {
  const int nf = static_cast<int>(f.inner.size());
  const std::vector<double> u = f.lifts(gamma);
  std::vector<Vec> T(static_cast<std::size_t>(nf), Vec::zero(gamma.box.dim));
  std::vector<double> lap(static_cast<std::size_t>(nf), 0.0);
  for (int i = 0; i < nf; ++i)
    for (const auto& x : gamma.points) {
      T[static_cast<std::size_t>(i)] += f.inner[static_cast<std::size_t>(i)].gradient(x);
      lap[static_cast<std::size_t>(i)] += f.inner[static_cast<std::size_t>(i)].laplacian(x);
    }
  const Vec S = potential_field_sum(pot, gamma);
  double out = 0;
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j)
      out += f.outer->partial2(i, j, u) *
             dot(T[static_cast<std::size_t>(i)], T[static_cast<std::size_t>(j)]);
  for (int j = 0; j < nf; ++j)
    out += f.outer->partial(j, u) *
           (lap[static_cast<std::size_t>(j)] - dot(S, T[static_cast<std::size_t>(j)]));
  return out;
}

MCTestReport test_ibp_translation(const CylinderFunction& F, const CylinderFunction& G,
                                  const Ensemble& ensemble, const PairPotential& pot) {
  require_samples(ensemble);
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples) {
    double r = dot(translation_gradient(F, gamma), translation_gradient(G, gamma)) +
               moving_frame_extra(pot, F, gamma) * G.value(gamma);
    res.push_back(r);
  }
  return make_mc_report("ibp_translation", res);
}

// ---------------------------------------------------------------------------
// Dirichlet form vs generator
// ---------------------------------------------------------------------------
MCTestReport test_dirichlet(DirichletForm form, const CylinderFunction& F,
                            const CylinderFunction& G, const Ensemble& ensemble,
                            const PairPotential& pot, DriftSign s) {
  if (form == DirichletForm::coup)
    throw std::invalid_argument(
        "test_dirichlet: the coupled form takes tagged product functionals");
  require_samples(ensemble);
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples) {
    double carre = carre_fixed(F, G, gamma);
    double lf;
    if (form == DirichletForm::gsdad) {
      lf = generator_fixed_frame(pot, F, gamma, s);
    } else {
      carre += dot(translation_gradient(F, gamma), translation_gradient(G, gamma));
      lf = generator_moving_frame(pot, F, gamma, s);
    }
    res.push_back(carre + lf * G.value(gamma));
  }
  MCTestReport rep = make_mc_report(std::string("dirichlet_") + to_string(form), res);
  annotate(rep, "sign", to_string(s));
  return rep;
}

MCTestReport test_dirichlet(const TaggedCylinderFunction& F,
                            const TaggedCylinderFunction& G, const Ensemble& ensemble,
                            const PairPotential& pot, DriftSign s, std::uint64_t seed) {
  require_samples(ensemble);
  const Box& box = ensemble.samples.front().box;
  const double volume = box.volume();
  RngStream rng(substream_seed(seed, 0xd11));
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples) {
    Vec xi = uniform_in_box(box, rng);
    double r = carre_coupled(F, G, xi, gamma) +
               generator_coupled(pot, F, xi, gamma, s) * G.value(xi, gamma);
    res.push_back(volume * r);
  }
  MCTestReport rep = make_mc_report("dirichlet_coup", res);
  annotate(rep, "sign", to_string(s));
  return rep;
}

// ---------------------------------------------------------------------------
// Generator symmetry
// ---------------------------------------------------------------------------
MCTestReport test_symmetry(DirichletForm form, const CylinderFunction& F,
                           const CylinderFunction& G, const Ensemble& ensemble,
                           const PairPotential& pot, DriftSign s) {
  if (form == DirichletForm::coup)
    throw std::invalid_argument(
        "test_symmetry: the coupled form takes tagged product functionals");
  require_samples(ensemble);
  auto gen = form == DirichletForm::gsdad ? generator_fixed_frame : generator_moving_frame;
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples)
    res.push_back(gen(pot, F, gamma, s) * G.value(gamma) -
                  F.value(gamma) * gen(pot, G, gamma, s));
  MCTestReport rep = make_mc_report(std::string("symmetry_") + to_string(form), res);
  annotate(rep, "sign", to_string(s));
  return rep;
}

MCTestReport test_symmetry(const TaggedCylinderFunction& F,
                           const TaggedCylinderFunction& G, const Ensemble& ensemble,
                           const PairPotential& pot, DriftSign s, std::uint64_t seed) {
  require_samples(ensemble);
  const Box& box = ensemble.samples.front().box;
  RngStream rng(substream_seed(seed, 0x51e));
  const double volume = box.volume();
  std::vector<double> res;
  res.reserve(ensemble.samples.size());
  for (const auto& gamma : ensemble.samples) {
    Vec xi = uniform_in_box(box, rng);
    res.push_back(volume *
                  (generator_coupled(pot, F, xi, gamma, s) * G.value(xi, gamma) -
                   F.value(xi, gamma) * generator_coupled(pot, G, xi, gamma, s)));
  }
  MCTestReport rep = make_mc_report("symmetry_coup", res);
  annotate(rep, "sign", to_string(s));
  return rep;
}

// ---------------------------------------------------------------------------
// Invariance under the flow
// ---------------------------------------------------------------------------
StateObservable observe(const CylinderFunction& F) {
  return [F](const SDEState& st) { return F.value(st.config); };
}

StateObservable observe(const TaggedCylinderFunction& F) {
  return [F](const SDEState& st) {
    if (!st.xi) throw std::invalid_argument("observe: state has no tagged position");
    return F.value(*st.xi, st.config);
  };
}

MCTestReport test_invariance(const StateObservable& F, System system,
                             const Ensemble& ensemble, const PairPotential& pot,
                             const IntegratorParams& params, std::uint64_t n_steps,
                             std::uint64_t seed) {
  require_samples(ensemble, 100);
  std::vector<double> d_end, d_avg;
  d_end.reserve(ensemble.samples.size());
  d_avg.reserve(ensemble.samples.size());
  std::uint64_t rejections = 0, steps = 0;
  std::size_t nonfinite = 0;
  for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
    const std::uint64_t path_seed = substream_seed(seed, i);
    std::optional<Vec> xi0;
    if (system == System::coup) {
      RngStream xi_rng(substream_seed(path_seed, 1));
      xi0 = uniform_in_box(ensemble.samples[i].box, xi_rng);
    }
    SDEState st = make_sde_state(system, ensemble.samples[i], path_seed, xi0);
    const double f0 = F(st);
    double acc = f0;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
      step(system, pot, st, params);
      acc += F(st);
    }
    const double ft = F(st);
    const double avg = acc / static_cast<double>(n_steps + 1);
    if (!std::isfinite(ft) || !std::isfinite(avg)) ++nonfinite;
    d_end.push_back(ft - f0);
    d_avg.push_back(avg - f0);
    rejections += st.rejections;
    steps += st.steps;
  }
  MCTestReport rep = make_mc_report("invariance", d_end);
  MCTestReport avg_rep = make_mc_report("invariance_avg", d_avg);
  rep.pass = rep.pass && avg_rep.pass;
  rep.inconclusive = rep.inconclusive && avg_rep.inconclusive;
  annotate(rep, "system", to_string(system));
  annotate(rep, "avg_estimate", std::to_string(avg_rep.estimate));
  annotate(rep, "avg_se", std::to_string(avg_rep.se));
  annotate(rep, "avg_z", std::to_string(avg_rep.z));
  annotate(rep, "rejection_rate",
           std::to_string(steps ? static_cast<double>(rejections) /
                                      static_cast<double>(steps)
                                : 0.0));
  if (nonfinite > 0) {
    rep.pass = false;
    rep.inconclusive = false;
    annotate(rep, "nonfinite", std::to_string(nonfinite));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Martingale property
// ---------------------------------------------------------------------------
namespace {

std::vector<MCTestReport> martingale_impl(
    System system, const Ensemble& ensemble, const PairPotential& pot,
    const IntegratorParams& params, const std::vector<double>& checkpoints,
    std::uint64_t seed, const std::function<double(const SDEState&)>& value,
    const std::function<double(const SDEState&)>& gen_value) {
  require_samples(ensemble, 100);
  if (checkpoints.empty())
    throw std::invalid_argument("test_martingale: no checkpoint times");

  // Map checkpoint times onto the step grid.
  std::vector<std::uint64_t> ksteps;
  for (double t : checkpoints) {
    if (t < 0 || !std::isfinite(t))
      throw std::invalid_argument("test_martingale: checkpoint times must be >= 0");
    if (t == 0) {
      ksteps.push_back(0);
    } else {
      if (params.dt <= 0)
        throw std::invalid_argument("test_martingale: dt must be positive to reach t > 0");
      ksteps.push_back(static_cast<std::uint64_t>(std::llround(t / params.dt)));
    }
  }
  const std::uint64_t max_steps = *std::max_element(ksteps.begin(), ksteps.end());

  std::vector<std::vector<double>> residuals(checkpoints.size());
  for (auto& r : residuals) r.reserve(ensemble.samples.size());
  std::uint64_t rejections = 0, steps = 0;

  for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
    const std::uint64_t path_seed = substream_seed(seed, i);
    std::optional<Vec> xi0;
    if (system == System::coup) {
      RngStream xi_rng(substream_seed(path_seed, 1));
      xi0 = uniform_in_box(ensemble.samples[i].box, xi_rng);
    }
    SDEState st = make_sde_state(system, ensemble.samples[i], path_seed, xi0);
    const double g0 = value(st);
    double integral = 0;
    double gen_prev = gen_value(st);
    for (std::size_t c = 0; c < ksteps.size(); ++c)
      if (ksteps[c] == 0) residuals[c].push_back(0.0);
    for (std::uint64_t k = 1; k <= max_steps; ++k) {
      step(system, pot, st, params);
      const double gen_cur = gen_value(st);
      integral += 0.5 * params.dt * (gen_prev + gen_cur);
      gen_prev = gen_cur;
      for (std::size_t c = 0; c < ksteps.size(); ++c)
        if (ksteps[c] == k) residuals[c].push_back(value(st) - g0 - integral);
    }
    rejections += st.rejections;
    steps += st.steps;
  }

  std::vector<MCTestReport> reports;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::size_t nonfinite = 0;
    for (double r : residuals[c])
      if (!std::isfinite(r)) ++nonfinite;
    MCTestReport rep =
        make_mc_report("martingale@t=" + format_time(checkpoints[c]), residuals[c]);
    annotate(rep, "system", to_string(system));
    annotate(rep, "t", format_time(checkpoints[c]));
    annotate(rep, "dt", format_time(params.dt));
    annotate(rep, "rejection_rate",
             std::to_string(steps ? static_cast<double>(rejections) /
                                        static_cast<double>(steps)
                                  : 0.0));
    if (nonfinite > 0) {
      rep.pass = false;
      rep.inconclusive = false;
      annotate(rep, "nonfinite", std::to_string(nonfinite));
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace

std::vector<MCTestReport> test_martingale(const CylinderFunction& G, System system,
                                          const Ensemble& ensemble,
                                          const PairPotential& pot, DriftSign s,
                                          const IntegratorParams& params,
                                          const std::vector<double>& checkpoints,
                                          std::uint64_t seed) {
  if (system != System::gsdad && system != System::env)
    throw std::invalid_argument(
        "test_martingale: cylinder observables run under gsdad or env");
  auto value = [&G](const SDEState& st) { return G.value(st.config); };
  auto gen = [&, system](const SDEState& st) {
    return system == System::gsdad ? generator_fixed_frame(pot, G, st.config, s)
                                   : generator_moving_frame(pot, G, st.config, s);
  };
  auto reports = martingale_impl(system, ensemble, pot, params, checkpoints, seed,
                                 value, gen);
  for (auto& r : reports) r.meta["sign"] = to_string(s);
  return reports;
}

std::vector<MCTestReport> test_martingale(const TaggedCylinderFunction& G,
                                          const Ensemble& ensemble,
                                          const PairPotential& pot, DriftSign s,
                                          const IntegratorParams& params,
                                          const std::vector<double>& checkpoints,
                                          std::uint64_t seed) {
  auto value = [&G](const SDEState& st) { return G.value(*st.xi, st.config); };
  auto gen = [&](const SDEState& st) {
    return generator_coupled(pot, G, *st.xi, st.config, s);
  };
  auto reports = martingale_impl(System::coup, ensemble, pot, params, checkpoints,
                                 seed, value, gen);
  for (auto& r : reports) r.meta["sign"] = to_string(s);
  return reports;
}

// ---------------------------------------------------------------------------
// Sign resolution
// ---------------------------------------------------------------------------
SignResolution resolve_sign_conventions(const CylinderFunction& F,
                                        const CylinderFunction& G,
                                        const VectorField& v, const Ensemble& ensemble,
                                        const PairPotential& pot) {
  SignResolution out;
  out.plus_report = test_ibp(F, G, v, ensemble, pot, DriftSign::plus);
  out.minus_report = test_ibp(F, G, v, ensemble, pot, DriftSign::minus);
  const bool p = out.plus_report.pass, m = out.minus_report.pass;
  if (p && m)
    throw SignResolutionError(
        SignResolutionError::Reason::both_pass,
        "sign resolution: both conventions pass; the one-body term carries no "
        "weight on this ensemble/field (unidentifiable)");
  if (!p && !m)
    throw SignResolutionError(
        SignResolutionError::Reason::both_fail,
        "sign resolution: both conventions fail; the integration-by-parts "
        "residual is off for reasons other than the sign");
  out.resolved = p ? DriftSign::plus : DriftSign::minus;
  return out;
}

SignResolution resolve_sign_conventions(const Ensemble& ensemble,
                                        const PairPotential& pot) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("resolve_sign_conventions: empty ensemble");
  IdentityProbes probes = standard_probes(ensemble.samples.front().box);
  return resolve_sign_conventions(probes.F_a, probes.G_a, probes.v_a, ensemble, pot);
}

}  // namespace gibbsdyn
