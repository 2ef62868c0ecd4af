#include "gibbsdyn/harmonic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace gibbsdyn {

namespace {

bool lex_less(const Vec& a, const Vec& b) {
  for (int k = 0; k < a.dim; ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

}  // namespace

double FiniteConfigFunction::operator()(std::vector<Vec> pts) const {
  if (static_cast<int>(pts.size()) > n_max) return 0.0;
  std::sort(pts.begin(), pts.end(), lex_less);
  return fn(pts);
}

double k_transform(const FiniteConfigFunction& g, const Configuration& gamma) {
  const int n = static_cast<int>(gamma.points.size());
  if (n > kMaxKTransformPoints)
    throw ResourceLimitError("k_transform: configuration exceeds the enumeration guard");
  double total = 0;
  const std::uint32_t masks = 1u << n;
  std::vector<Vec> subset;
  subset.reserve(static_cast<std::size_t>(n));
  for (std::uint32_t m = 0; m < masks; ++m) {
    if (std::popcount(m) > g.n_max) continue;
    subset.clear();
    for (int i = 0; i < n; ++i)
      if (m & (1u << i)) subset.push_back(gamma.points[static_cast<std::size_t>(i)]);
    total += g(subset);
  }
  return total;
}

FiniteConfigFunction star_convolution(FiniteConfigFunction g1, FiniteConfigFunction g2) {
  FiniteConfigFunction out;
  out.n_max = g1.n_max + g2.n_max;
  out.fn = [g1 = std::move(g1), g2 = std::move(g2)](const std::vector<Vec>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n > kMaxStarPoints)
      throw ResourceLimitError("star_convolution: configuration exceeds the enumeration guard");
    // Each point goes to part 1, the shared middle part 2, or part 3.
    std::size_t assignments = 1;
    for (int i = 0; i < n; ++i) assignments *= 3;
    double total = 0;
    std::vector<Vec> left, right;
    std::vector<int> digit(static_cast<std::size_t>(n));
    for (std::size_t a = 0; a < assignments; ++a) {
      std::size_t rem = a;
      left.clear();
      right.clear();
      for (int i = 0; i < n; ++i) {
        digit[static_cast<std::size_t>(i)] = static_cast<int>(rem % 3);
        rem /= 3;
        if (digit[static_cast<std::size_t>(i)] <= 1)
          left.push_back(pts[static_cast<std::size_t>(i)]);
        if (digit[static_cast<std::size_t>(i)] >= 1)
          right.push_back(pts[static_cast<std::size_t>(i)]);
      }
      if (static_cast<int>(left.size()) > g1.n_max) continue;
      if (static_cast<int>(right.size()) > g2.n_max) continue;
      double v1 = g1(left);
      if (v1 == 0.0) continue;
      total += v1 * g2(right);
    }
    return total;
  };
  return out;
}

double k_homomorphism_residual(const FiniteConfigFunction& g1,
                               const FiniteConfigFunction& g2,
                               const Configuration& gamma) {
  FiniteConfigFunction prod = star_convolution(g1, g2);
  return k_transform(prod, gamma) - k_transform(g1, gamma) * k_transform(g2, gamma);
}

LPIntegralResult lp_integral(const FiniteConfigFunction& g, const EnergyModel& model,
                             double z, int max_sector, std::size_t samples_per_sector,
                             std::uint64_t seed) {
  if (max_sector < 0 || max_sector > kMaxLPSector)
    throw ResourceLimitError("lp_integral: sector count exceeds the guard");
  if (!(z >= 0)) throw std::invalid_argument("lp_integral: activity must be >= 0");
  if (samples_per_sector == 0)
    throw std::invalid_argument("lp_integral: need at least one sample per sector");

  const Box& box = model.box;
  const double mass = one_body_mass(model);

  // Envelope for rejection sampling from u(x)dx: u <= exp(-min phi).
  double min_phi = 0.0;
  if (!model.pot.identically_zero) {
    for (int i = 1; i <= 100000; ++i) {
      double r = box.side * static_cast<double>(i) / 100000.0;
      min_phi = std::min(min_phi, model.pot.value_radial(r));
    }
  }
  const double envelope = boltzmann(min_phi);

  LPIntegralResult out;
  out.sector_value.assign(static_cast<std::size_t>(max_sector) + 1, 0.0);
  out.sector_value[0] = g({});  // empty sector, exact
  out.value = out.sector_value[0];
  double var = 0;

  double log_zn_over_nfact = 0;  // log(z^n / n!)
  for (int n = 1; n <= max_sector; ++n) {
    log_zn_over_nfact += std::log(z) - std::log(static_cast<double>(n));
    if (n > g.n_max) continue;  // G vanishes on larger sectors
    RngStream rng(substream_seed(seed, static_cast<std::uint64_t>(n)));
    auto draw_point = [&]() {
      for (;;) {
        Vec x(box.dim);
        for (int k = 0; k < box.dim; ++k) x[k] = rng.uniform(-box.half(), box.half());
        if (model.pot.identically_zero) return x;
        if (rng.uniform() * envelope <= model.one_body_weight(x)) return x;
      }
    };
    std::vector<double> vals(samples_per_sector);
    std::vector<Vec> pts(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < samples_per_sector; ++s) {
      for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = draw_point();
      vals[s] = g(pts);
    }
    MeanSE ms = mean_se(vals);
    const double scale = std::exp(log_zn_over_nfact) * std::pow(mass, n);
    out.sector_value[static_cast<std::size_t>(n)] = scale * ms.mean;
    out.value += scale * ms.mean;
    var += scale * scale * ms.se * ms.se;
  }
  out.se = std::sqrt(var);
  return out;
}

MCTestReport correlation_identity_check(const FiniteConfigFunction& g,
                                        const std::vector<Configuration>& samples,
                                        const EnergyModel& model, int nbins) {
  if (g.n_max > 2)
    throw std::invalid_argument(
        "correlation_identity_check: only functions of at most two points are supported");
  if (samples.empty())
    throw std::invalid_argument("correlation_identity_check: no samples");
  if (nbins < 1) throw std::invalid_argument("correlation_identity_check: need bins");
  const Box& box = model.box;
  const int dim = box.dim;

  // Bin layouts match estimate_rho: first-coordinate slabs for the one-point
  // part, separation shells for the two-point part.
  const double h = box.half();
  const double w1 = box.side / nbins;
  const double w2 = h / nbins;
  auto slab_of = [&](double x) {
    int b = static_cast<int>(std::floor((x + h) / w1));
    return (b >= 0 && b < nbins) ? b : -1;
  };
  auto shell_of = [&](double r) {
    int b = static_cast<int>(std::floor(r / w2));
    return (b >= 0 && b < nbins) ? b : -1;
  };

  // Reference masses D and G-weighted masses W per bin.  The identity is
  // tested through the binned correlation estimators, so the per-bin ratio
  // W/D multiplies the same sample counts the estimators use; binning bias is
  // second order in the bin width and vanishes for constant correlations.
  std::vector<double> d1(static_cast<std::size_t>(nbins), 0.0),
      wg1(static_cast<std::size_t>(nbins), 0.0),
      d2(static_cast<std::size_t>(nbins), 0.0),
      wg2(static_cast<std::size_t>(nbins), 0.0);

  if (dim == 1) {
    for (int b = 0; b < nbins; ++b) {
      double lo = -h + b * w1, hi = lo + w1;
      auto fu = [&](double x) { return model.one_body_weight(Vec::of(x)); };
      auto fgu = [&](double x) {
        return g({Vec::of(x)}) * model.one_body_weight(Vec::of(x));
      };
      d1[static_cast<std::size_t>(b)] = adaptive_simpson(fu, lo, hi, 1e-11).value;
      wg1[static_cast<std::size_t>(b)] = adaptive_simpson(fgu, lo, hi, 1e-11).value;
    }
  }
  const int ng = dim == 1 ? 1024 : (dim == 2 ? 72 : 20);
  {
    const double hc = box.side / ng;
    std::vector<Vec> nodes;
    std::vector<double> axis(static_cast<std::size_t>(ng));
    for (int i = 0; i < ng; ++i) axis[static_cast<std::size_t>(i)] = -h + (i + 0.5) * hc;
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
    const double cv = std::pow(hc, dim);
    std::vector<double> uw(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      uw[i] = model.one_body_weight(nodes[i]);
    if (dim != 1) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        int b = slab_of(nodes[i][0]);
        if (b < 0) continue;
        d1[static_cast<std::size_t>(b)] += uw[i] * cv;
        wg1[static_cast<std::size_t>(b)] += g({nodes[i]}) * uw[i] * cv;
      }
    }
    if (g.n_max >= 2) {
      for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          int b = shell_of(box.distance(nodes[i], nodes[j]));
          if (b < 0) continue;
          double m = 2.0 * uw[i] * uw[j] * cv * cv;  // both orderings
          d2[static_cast<std::size_t>(b)] += m;
          // G-weighted mass: 1/2 sum over ordered pairs = unordered sum.
          wg2[static_cast<std::size_t>(b)] += g({nodes[i], nodes[j]}) * uw[i] * uw[j] * cv * cv;
        }
    }
  }

  std::vector<double> residuals(samples.size());
  const double g_empty = g({});
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& pts = samples[s].points;
    double t = g_empty;
    for (const auto& p : pts) {
      int b = slab_of(p[0]);
      if (b >= 0 && d1[static_cast<std::size_t>(b)] > 0)
        t += wg1[static_cast<std::size_t>(b)] / d1[static_cast<std::size_t>(b)];
    }
    if (g.n_max >= 2) {
      for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          int b = shell_of(box.distance(pts[i], pts[j]));
          if (b >= 0 && d2[static_cast<std::size_t>(b)] > 0)
            t += 2.0 * wg2[static_cast<std::size_t>(b)] / d2[static_cast<std::size_t>(b)];
        }
    }
    residuals[s] = k_transform(g, samples[s]) - t;
  }
  MCTestReport rep = make_mc_report("correlation_identity", residuals);
  rep.meta["bins"] = std::to_string(nbins);
  return rep;
}

}  // namespace gibbsdyn
