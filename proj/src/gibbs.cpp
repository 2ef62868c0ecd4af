#include "gibbsdyn/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbsdyn/stats.hpp"

namespace gibbsdyn {

namespace {

// Pair value at separation r with coincidence treated as a hard overlap.
inline double phi_at(const PairPotential& pot, double r) {
  if (pot.identically_zero) return 0.0;
  return r <= 0.0 ? kInf : pot.value_radial(r);
}

// Radius that covers the whole box under either boundary mode.
inline double full_range(const Box& box) { return 2.0 * box.side; }

}  // namespace

double pair_energy(const EnergyModel& model, const std::vector<Vec>& pts) {
  double e = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double v = phi_at(model.pot, model.box.distance(pts[i], pts[j]));
      if (v == kInf) return kInf;
      e += v;
    }
  return e;
}

double interaction_energy(const EnergyModel& model, const std::vector<Vec>& a,
                          const std::vector<Vec>& b) {
  double e = 0;
  for (const auto& x : a)
    for (const auto& y : b) {
      double v = phi_at(model.pot, model.box.distance(x, y));
      if (v == kInf) return kInf;
      e += v;
    }
  return e;
}

double conditional_energy(const EnergyModel& model, const std::vector<Vec>& pts) {
  double e = pair_energy(model, pts);
  if (e == kInf) return kInf;
  double w = interaction_energy(model, pts, model.boundary);
  return w == kInf ? kInf : e + w;
}

double delta_energy(const EnergyModel& model, const Configuration& cfg,
                    const CellList& cl, const Proposal& prop) {
  const auto& pts = cfg.points;
  const double rfull = full_range(model.box);
  auto sum_to = [&](const Vec& x, int exclude) {
    double s = 0;
    for (int j : gather_within(cl, cfg, x, rfull, exclude)) {
      double v = phi_at(model.pot, model.box.distance(x, pts[static_cast<std::size_t>(j)]));
      if (v == kInf) return kInf;
      s += v;
    }
    for (const auto& b : model.boundary) {
      double v = phi_at(model.pot, model.box.distance(x, b));
      if (v == kInf) return kInf;
      s += v;
    }
    return s;
  };

  switch (prop.kind) {
    case Proposal::Kind::insert:
      return sum_to(prop.position, -1);
    case Proposal::Kind::remove: {
      if (prop.index < 0 || prop.index >= static_cast<int>(pts.size()))
        throw std::invalid_argument("delta_energy: remove index out of range");
      double s = sum_to(pts[static_cast<std::size_t>(prop.index)], prop.index);
      return s == kInf ? kInf : -s;
    }
    case Proposal::Kind::displace: {
      if (prop.index < 0 || prop.index >= static_cast<int>(pts.size()))
        throw std::invalid_argument("delta_energy: displace index out of range");
      double snew = sum_to(prop.position, prop.index);
      if (snew == kInf) return kInf;
      double sold = sum_to(pts[static_cast<std::size_t>(prop.index)], prop.index);
      return snew - sold;
    }
  }
  throw std::logic_error("delta_energy: unknown proposal kind");
}

// ---------------------------------------------------------------------------
// Acceptance probabilities
// ---------------------------------------------------------------------------
double insert_acceptance(double z, double volume, std::size_t n_before, double u,
                         double delta_e) {
  if (u <= 0.0 || delta_e == kInf) return 0.0;
  double a = z * u * volume / static_cast<double>(n_before + 1) * boltzmann(delta_e) /
             boltzmann(0.0);
  return std::min(1.0, a);
}

double remove_acceptance(double z, double volume, std::size_t n_before, double u,
                         double delta_e) {
  if (n_before == 0) return 0.0;
  if (u <= 0.0) return 1.0;  // removing a zero-weight point is always favourable
  if (delta_e == kInf) return 0.0;
  double a = static_cast<double>(n_before) / (z * u * volume) * std::exp(-delta_e);
  return std::min(1.0, a);
}

double displace_acceptance(double phi_old, double phi_new, double delta_e) {
  if (phi_new == kInf || delta_e == kInf) return 0.0;
  double arg = -(phi_new - phi_old) - delta_e;
  return std::min(1.0, std::exp(std::min(arg, 0.0)));
}

// ---------------------------------------------------------------------------
// GcmcChain
// ---------------------------------------------------------------------------
GcmcChain::GcmcChain(EnergyModel model, SamplerParams params)
    : model_(std::move(model)), params_(params), rng_(substream_seed(params.seed, 0)) {
  double psum = params_.p_insert + params_.p_remove + params_.p_displace;
  if (params_.p_insert < 0 || params_.p_remove < 0 || params_.p_displace < 0 ||
      std::abs(psum - 1.0) > 1e-12)
    throw std::invalid_argument("GcmcChain: move probabilities must be >= 0 and sum to 1");
  if (!(params_.z > 0)) throw std::invalid_argument("GcmcChain: activity must be positive");
  if (!(params_.displace_sigma > 0))
    throw std::invalid_argument("GcmcChain: displacement scale must be positive");
  rebuild_index();
}

void GcmcChain::rebuild_index() {
  cfg_ = unchecked_configuration(model_.box, pts_);
  cl_ = build_cell_list(cfg_, model_.box.side);
}

double GcmcChain::recompute_energy() const { return conditional_energy(model_, pts_); }

Configuration GcmcChain::snapshot() const { return make_configuration(model_.box, pts_); }

void GcmcChain::run(std::uint64_t steps) {
  for (std::uint64_t s = 0; s < steps; ++s) step();
}

void GcmcChain::step() {
  double u0 = rng_.uniform();
  if (u0 < params_.p_insert) {
    try_insert();
  } else if (u0 < params_.p_insert + params_.p_remove) {
    try_remove();
  } else {
    try_displace();
  }
}

void GcmcChain::try_insert() {
  ++counters_.proposed[0];
  Vec x(model_.box.dim);
  for (int k = 0; k < model_.box.dim; ++k)
    x[k] = rng_.uniform(-model_.box.half(), model_.box.half());

  double a = 0.0;
  double de = 0.0, phi1 = 0.0;
  if (pts_.size() < params_.max_particles &&
      gather_within(cl_, cfg_, x, model_.box.r_distinct()).empty()) {
    phi1 = model_.one_body_phi(x);
    de = delta_energy(model_, cfg_, cl_, {Proposal::Kind::insert, x, -1});
    a = insert_acceptance(params_.z, model_.box.volume(), pts_.size(),
                          boltzmann(phi1), de);
  }
  if (rng_.uniform() < a) {
    ++counters_.accepted[0];
    pts_.push_back(x);
    one_body_phi_.push_back(phi1);
    energy_ += de;
    rebuild_index();
  }
}

void GcmcChain::try_remove() {
  ++counters_.proposed[1];
  if (pts_.empty()) return;
  int i = static_cast<int>(rng_.uniform_index(pts_.size()));
  double de = delta_energy(model_, cfg_, cl_, {Proposal::Kind::remove, Vec(), i});
  double a = remove_acceptance(params_.z, model_.box.volume(), pts_.size(),
                               boltzmann(one_body_phi_[static_cast<std::size_t>(i)]), de);
  if (rng_.uniform() < a) {
    ++counters_.accepted[1];
    pts_.erase(pts_.begin() + i);
    one_body_phi_.erase(one_body_phi_.begin() + i);
    energy_ += de;
    rebuild_index();
  }
}

void GcmcChain::try_displace() {
  ++counters_.proposed[2];
  if (pts_.empty()) return;
  int i = static_cast<int>(rng_.uniform_index(pts_.size()));
  Vec x = pts_[static_cast<std::size_t>(i)];
  Vec xp(model_.box.dim);
  for (int k = 0; k < model_.box.dim; ++k)
    xp[k] = x[k] + params_.displace_sigma * rng_.normal();
  if (model_.box.mode == BoundaryMode::periodic) {
    xp = model_.box.wrap(xp);
  } else if (!model_.box.contains(xp)) {
    return;  // walked out of a free box: proposal rejected
  }
  if (!gather_within(cl_, cfg_, xp, model_.box.r_distinct(), i).empty())
    return;  // would violate simplicity

  double phi_new = model_.one_body_phi(xp);
  double de = delta_energy(model_, cfg_, cl_, {Proposal::Kind::displace, xp, i});
  double a = displace_acceptance(one_body_phi_[static_cast<std::size_t>(i)], phi_new, de);
  if (rng_.uniform() < a) {
    ++counters_.accepted[2];
    pts_[static_cast<std::size_t>(i)] = xp;
    one_body_phi_[static_cast<std::size_t>(i)] = phi_new;
    energy_ += de;
    rebuild_index();
  }
}

// ---------------------------------------------------------------------------
// Ensemble sampling
// ---------------------------------------------------------------------------
Ensemble sample_ensemble(const EnergyModel& model, const SamplerParams& params,
                         std::size_t count) {
  if (count == 0) throw std::invalid_argument("sample_ensemble: count must be positive");
  GcmcChain chain(model, params);
  chain.run(params.burn_in);

  std::uint64_t thin = params.thinning;
  if (thin == 0) {
    const std::size_t pilot = 8192;
    std::vector<double> ns;
    ns.reserve(pilot);
    for (std::size_t s = 0; s < pilot; ++s) {
      chain.step();
      ns.push_back(static_cast<double>(chain.size()));
    }
    double tau = integrated_autocorr_time(ns);
    thin = std::clamp<std::uint64_t>(
        static_cast<std::uint64_t>(std::ceil(2.0 * tau)), 1, 4096);
  }

  Ensemble ens;
  ens.samples.reserve(count);
  std::vector<double> ns;
  ns.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    chain.run(thin);
    ens.samples.push_back(chain.snapshot());
    ns.push_back(static_cast<double>(chain.size()));
  }

  const auto& c = chain.counters();
  auto rate = [](std::uint64_t acc, std::uint64_t prop) {
    return prop ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
  };
  ens.diag.accept_insert = rate(c.accepted[0], c.proposed[0]);
  ens.diag.accept_remove = rate(c.accepted[1], c.proposed[1]);
  ens.diag.accept_displace = rate(c.accepted[2], c.proposed[2]);
  ens.diag.tau_count = integrated_autocorr_time(ns);
  ens.diag.thinning = thin;
  ens.diag.ess = effective_sample_size(count, ens.diag.tau_count);
  return ens;
}

// ---------------------------------------------------------------------------
// Reference-measure quadrature
// ---------------------------------------------------------------------------
namespace {

int grid_nodes_per_axis(int dim, int order) {
  if (order == 1) return dim == 2 ? 768 : 96;
  return dim == 1 ? 2048 : (dim == 2 ? 96 : 24);
}

}  // namespace

double one_body_mass(const EnergyModel& model) {
  const Box& box = model.box;
  if (model.pot.identically_zero) return box.volume();
  if (box.dim == 1) {
    auto f = [&](double x) { return model.one_body_weight(Vec::of(x)); };
    return adaptive_simpson(f, -box.half(), box.half(), 1e-12).value;
  }
  const int n = grid_nodes_per_axis(box.dim, 1);
  const double hcell = box.side / n;
  double total = 0;
  std::vector<double> axis(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = -box.half() + (i + 0.5) * hcell;
  if (box.dim == 2) {
    for (double x : axis)
      for (double y : axis) total += model.one_body_weight(Vec::of(x, y));
    return total * hcell * hcell;
  }
  for (double x : axis)
    for (double y : axis)
      for (double z : axis) total += model.one_body_weight(Vec::of(x, y, z));
  return total * hcell * hcell * hcell;
}

double clipped_ball_volume(int dim, double R, double h) {
  if (R <= 0 || h <= 0) return 0.0;
  auto area2 = [](double r, double hh) {
    if (r <= 0) return 0.0;
    if (r <= hh) return M_PI * r * r;
    if (r * r >= 2.0 * hh * hh) return 4.0 * hh * hh;
    return M_PI * r * r -
           4.0 * (r * r * std::acos(hh / r) - hh * std::sqrt(r * r - hh * hh));
  };
  switch (dim) {
    case 1: return std::min(2.0 * R, 2.0 * h);
    case 2: return area2(R, h);
    case 3: {
      if (R <= h) return 4.0 / 3.0 * M_PI * R * R * R;
      if (R * R >= 3.0 * h * h) return 8.0 * h * h * h;
      double zmax = std::min(R, h);
      auto slice = [&](double z) { return area2(std::sqrt(std::max(0.0, R * R - z * z)), h); };
      return 2.0 * adaptive_simpson(slice, 0.0, zmax, 1e-12).value;
    }
    default:
      throw std::invalid_argument("clipped_ball_volume: dimension must be 1..3");
  }
}

RhoEstimate estimate_rho(const std::vector<Configuration>& samples,
                         const EnergyModel& model, int order, int nbins) {
  if (samples.empty()) throw std::invalid_argument("estimate_rho: no samples");
  if (order != 1 && order != 2)
    throw std::invalid_argument("estimate_rho: order must be 1 or 2");
  if (nbins < 1) throw std::invalid_argument("estimate_rho: need at least one bin");
  const Box& box = model.box;
  const int dim = box.dim;
  const std::size_t M = samples.size();

  RhoEstimate out;
  out.order = order;
  out.edges.resize(static_cast<std::size_t>(nbins) + 1);

  const double lo = order == 1 ? -box.half() : 0.0;
  const double hi = box.half();
  const double width = (hi - lo) / nbins;
  for (int b = 0; b <= nbins; ++b)
    out.edges[static_cast<std::size_t>(b)] = lo + b * width;

  // Per-sample bin counts.
  std::vector<std::vector<double>> counts(
      static_cast<std::size_t>(nbins), std::vector<double>(M, 0.0));
  auto bin_of = [&](double v) {
    int b = static_cast<int>(std::floor((v - lo) / width));
    return (b >= 0 && b < nbins) ? b : -1;
  };
  for (std::size_t s = 0; s < M; ++s) {
    const auto& pts = samples[s].points;
    if (order == 1) {
      for (const auto& p : pts) {
        int b = bin_of(p[0]);
        if (b >= 0) counts[static_cast<std::size_t>(b)][s] += 1.0;
      }
    } else {
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          int b = bin_of(box.distance(pts[i], pts[j]));
          if (b >= 0) counts[static_cast<std::size_t>(b)][s] += 2.0;  // ordered pairs
        }
    }
  }

  // Reference-measure mass per bin.
  out.denom.assign(static_cast<std::size_t>(nbins), 0.0);
  if (order == 1) {
    if (dim == 1) {
      for (int b = 0; b < nbins; ++b) {
        auto f = [&](double x) { return model.one_body_weight(Vec::of(x)); };
        out.denom[static_cast<std::size_t>(b)] =
            adaptive_simpson(f, out.edges[static_cast<std::size_t>(b)],
                             out.edges[static_cast<std::size_t>(b) + 1], 1e-12)
                .value;
      }
    } else {
      const int n = grid_nodes_per_axis(dim, 1);
      const double hcell = box.side / n;
      std::vector<double> axis(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        axis[static_cast<std::size_t>(i)] = -box.half() + (i + 0.5) * hcell;
      for (double x : axis) {
        int b = bin_of(x);
        if (b < 0) continue;
        double slab = 0;
        if (dim == 2) {
          for (double y : axis) slab += model.one_body_weight(Vec::of(x, y));
          slab *= hcell;
        } else {
          for (double y : axis)
            for (double z : axis) slab += model.one_body_weight(Vec::of(x, y, z));
          slab *= hcell * hcell;
        }
        out.denom[static_cast<std::size_t>(b)] += slab * hcell;
      }
    }
  } else {
    if (model.pot.identically_zero && box.mode == BoundaryMode::periodic) {
      // Minimum-image displacements of independent uniform points are uniform
      // on the fundamental domain, so shell masses are exact clipped-ball
      // volume differences.
      for (int b = 0; b < nbins; ++b) {
        double v_hi = clipped_ball_volume(dim, out.edges[static_cast<std::size_t>(b) + 1],
                                          box.half());
        double v_lo =
            clipped_ball_volume(dim, out.edges[static_cast<std::size_t>(b)], box.half());
        out.denom[static_cast<std::size_t>(b)] = box.volume() * (v_hi - v_lo);
      }
    } else {
      const int n = grid_nodes_per_axis(dim, 2);
      const double hcell = box.side / n;
      std::vector<Vec> nodes;
      std::vector<double> weight;
      std::vector<double> axis(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        axis[static_cast<std::size_t>(i)] = -box.half() + (i + 0.5) * hcell;
      if (dim == 1) {
        for (double x : axis) nodes.push_back(Vec::of(x));
      } else if (dim == 2) {
        for (double x : axis)
          for (double y : axis) nodes.push_back(Vec::of(x, y));
      } else {
        for (double x : axis)
          for (double y : axis)
            for (double z : axis) nodes.push_back(Vec::of(x, y, z));
      }
      weight.resize(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i)
        weight[i] = model.one_body_weight(nodes[i]);
      const double cv = std::pow(hcell, dim);
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          int b = bin_of(box.distance(nodes[i], nodes[j]));
          if (b >= 0)
            out.denom[static_cast<std::size_t>(b)] += 2.0 * weight[i] * weight[j] * cv * cv;
        }
    }
  }

  out.value.assign(static_cast<std::size_t>(nbins), 0.0);
  out.se.assign(static_cast<std::size_t>(nbins), 0.0);
  for (int b = 0; b < nbins; ++b) {
    double d = out.denom[static_cast<std::size_t>(b)];
    if (d <= 0) continue;
    MeanSE ms = mean_se(counts[static_cast<std::size_t>(b)]);
    out.value[static_cast<std::size_t>(b)] = ms.mean / d;
    out.se[static_cast<std::size_t>(b)] = ms.se / d;
  }
  return out;
}

ConditionReport ruelle_check(const RhoEstimate& rho1, const RhoEstimate& rho2,
                             double c_r) {
  if (rho1.order != 1 || rho2.order != 2)
    throw std::invalid_argument("ruelle_check: pass a first- and a second-order estimate");
  if (!(c_r > 0)) throw std::invalid_argument("ruelle_check: bound must be positive");
  ConditionReport rep;
  rep.id = "ruelle_bound";
  int usable = 0;
  bool ok = true;
  double worst1 = -kInf, worst2 = -kInf;
  auto scan = [&](const RhoEstimate& r, double bound, double& worst) {
    for (std::size_t b = 0; b < r.value.size(); ++b) {
      if (r.denom[b] <= 0) continue;
      ++usable;
      double slack = r.se[b] > 0 ? (r.value[b] - bound) / r.se[b]
                                 : (r.value[b] > bound ? kInf : -kInf);
      worst = std::max(worst, slack);
      if (r.value[b] > bound + 3.0 * r.se[b]) ok = false;
    }
  };
  scan(rho1, c_r, worst1);
  scan(rho2, c_r * c_r, worst2);
  rep.estimates["bound"] = c_r;
  rep.estimates["max_excess_z_order1"] = worst1;
  rep.estimates["max_excess_z_order2"] = worst2;
  if (usable == 0) {
    rep.verdict = Verdict::inconclusive;
    rep.notes = "no usable bins";
  } else if (ok) {
    rep.verdict = Verdict::pass;
    rep.notes = "binned correlation estimates respect the bound within 3 se";
  } else {
    rep.verdict = Verdict::fail;
    rep.notes = "a binned correlation estimate exceeds the bound by more than 3 se";
  }
  return rep;
}

}  // namespace gibbsdyn
