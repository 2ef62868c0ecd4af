#include "gibbsdyn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace gibbsdyn {

MeanSE mean_se(const std::vector<double>& xs) {
  MeanSE r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double v = 0;
  for (double x : xs) v += (x - r.mean) * (x - r.mean);
  v /= static_cast<double>(r.n - 1);
  r.sd = std::sqrt(v);
  r.se = r.sd / std::sqrt(static_cast<double>(r.n));
  return r;
}

double integrated_autocorr_time(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 8) return 1.0;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  auto cov = [&](std::size_t k) {
    double s = 0;
    for (std::size_t i = 0; i + k < n; ++i) s += (xs[i] - mean) * (xs[i + k] - mean);
    return s / static_cast<double>(n);
  };
  double c0 = cov(0);
  if (!(c0 > 0)) return 1.0;
  // Sum pairwise-lag autocorrelations while the pair sums stay positive.
  double total = 0;
  const std::size_t max_lag = n / 2;
  for (std::size_t m = 0;; ++m) {
    std::size_t k1 = 2 * m, k2 = 2 * m + 1;
    if (k2 >= max_lag) break;
    double gamma = (cov(k1) + cov(k2)) / c0;
    if (gamma <= 0) break;
    total += gamma;
  }
  return std::max(1.0, 2.0 * total - 1.0);
}

double chi_square_tail(double statistic, double dof) {
  if (dof <= 0) throw std::invalid_argument("chi_square_tail: dof must be positive");
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               int dof_reduction, double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch or empty input");
  // Pool adjacent categories left-to-right until each pooled expected count
  // reaches the threshold; a final under-filled pool merges backwards.
  std::vector<double> obs_p, exp_p;
  double o = 0, e = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= min_expected) {
      obs_p.push_back(o);
      exp_p.push_back(e);
      o = e = 0;
    }
  }
  if (e > 0 || o > 0) {
    if (!exp_p.empty()) {
      obs_p.back() += o;
      exp_p.back() += e;
    } else {
      obs_p.push_back(o);
      exp_p.push_back(e);
    }
  }
  ChiSquareResult res;
  res.pooled_bins = static_cast<int>(obs_p.size());
  res.dof = res.pooled_bins - 1 - dof_reduction;
  for (std::size_t i = 0; i < obs_p.size(); ++i) {
    if (exp_p[i] <= 0) continue;
    double d = obs_p[i] - exp_p[i];
    res.statistic += d * d / exp_p[i];
  }
  res.p_value = res.dof >= 1 ? chi_square_tail(res.statistic, res.dof) : 1.0;
  return res;
}

double poisson_pmf(int k, double lambda) {
  if (k < 0) return 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

ChiSquareResult chi_square_poisson(const std::vector<double>& counts, double lambda) {
  if (counts.empty() || !(lambda > 0))
    throw std::invalid_argument("chi_square_poisson: empty histogram or bad rate");
  double total = 0;
  for (double c : counts) total += c;
  std::vector<double> expected(counts.size());
  double cum = 0;
  for (std::size_t k = 0; k + 1 < counts.size(); ++k) {
    expected[k] = total * poisson_pmf(static_cast<int>(k), lambda);
    cum += poisson_pmf(static_cast<int>(k), lambda);
  }
  expected.back() = total * std::max(0.0, 1.0 - cum);  // tail mass
  return chi_square_gof(counts, expected, 0);
}

double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

MCTestReport make_mc_report(std::string id, const std::vector<double>& residuals,
                            double z_threshold) {
  MCTestReport rep;
  rep.id = std::move(id);
  MeanSE ms = mean_se(residuals);
  rep.estimate = ms.mean;
  rep.se = ms.se;
  rep.n = ms.n;
  if (ms.se > 0) {
    rep.z = ms.mean / ms.se;
    rep.pass = std::abs(rep.z) <= z_threshold;
  } else {
    // Degenerate series: no scatter, so there is no statistical verdict.
    // An exactly-zero residual still "passes" (the identity holds exactly);
    // either way the report is flagged inconclusive.
    rep.z = 0;
    rep.pass = ms.mean == 0.0;
    rep.inconclusive = true;
  }
  return rep;
}

double ks_two_sample_p(const std::vector<double>& a, const std::vector<double>& b) {
  double d = ks_two_sample_statistic(a, b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double ne = na * nb / (na + nb);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Asymptotic Kolmogorov tail Q(lambda) = 2 sum_j (-1)^{j-1} exp(-2 j^2 lambda^2).
  double p = 0;
  for (int j = 1; j <= 101; ++j) {
    double term = 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    p += (j % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace gibbsdyn
