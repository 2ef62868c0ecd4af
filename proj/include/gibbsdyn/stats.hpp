// Small statistics toolkit: moments, autocorrelation, chi-square and
// Kolmogorov-Smirnov goodness-of-fit helpers for Monte Carlo diagnostics.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace gibbsdyn {

struct MeanSE {
  double mean = 0;
  double se = 0;  // standard error of the mean
  double sd = 0;  // sample standard deviation
  std::size_t n = 0;
};

MeanSE mean_se(const std::vector<double>& xs);

// Integrated autocorrelation time via Geyer's initial-positive-sequence
// estimator.  Returns 1 for (near-)uncorrelated or constant series; always
// >= 1.  A series shorter than 8 returns 1.
double integrated_autocorr_time(const std::vector<double>& xs);

inline double effective_sample_size(std::size_t n, double tau) {
  return tau > 0 ? static_cast<double>(n) / tau : static_cast<double>(n);
}

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  int pooled_bins = 0;  // number of categories after pooling
};

// Pearson chi-square of observed counts against expected counts (same
// length).  Adjacent categories are pooled until every expected count is at
// least `min_expected`.  dof = pooled_bins - 1 - dof_reduction (distribution
// parameters estimated from the data reduce dof further).
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               int dof_reduction = 0, double min_expected = 5.0);

// Chi-square goodness of fit of integer draws against Poisson(lambda).
// `counts` is the histogram over k = 0, 1, ..., counts.size()-1; draws above
// the histogram range must be accumulated into the last bin by the caller.
ChiSquareResult chi_square_poisson(const std::vector<double>& counts, double lambda);

double poisson_pmf(int k, double lambda);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value (with the
// Stephens small-sample correction of the argument).
double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b);
double ks_two_sample_p(const std::vector<double>& a, const std::vector<double>& b);

// Upper-tail probability of the chi-square distribution.
double chi_square_tail(double statistic, double dof);

// ---------------------------------------------------------------------------
// Standard report for a Monte Carlo identity test: the estimate of a quantity
// whose exact value is zero, its standard error, and the z-score verdict.
// ---------------------------------------------------------------------------
struct MCTestReport {
  std::string id;
  double estimate = 0;
  double se = 0;
  double z = 0;          // estimate / se
  std::size_t n = 0;     // number of paired residuals
  bool pass = false;     // |z| <= threshold
  bool inconclusive = false;
  std::map<std::string, std::string> meta;
};

// Build a report from per-sample residuals of a quantity that should average
// to zero.  A degenerate series (se == 0) passes only if the mean is exactly
// zero and is flagged inconclusive (no statistical content).
MCTestReport make_mc_report(std::string id, const std::vector<double>& residuals,
                            double z_threshold = 3.0);

}  // namespace gibbsdyn
