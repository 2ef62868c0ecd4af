#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gibbsdyn/rng.hpp"
#include "gibbsdyn/stats.hpp"

using namespace gibbsdyn;

TEST_CASE("mean and standard error on a known series") {
  MeanSE m = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == doctest::Approx(2.5));
  // Sample variance 5/3, sd = sqrt(5/3), se = sd/2.
  CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(m.n == 4);

  MeanSE single = mean_se({7.0});
  CHECK(single.mean == 7.0);
  CHECK(single.se == 0.0);

  MeanSE empty = mean_se({});
  CHECK(empty.n == 0);
}

TEST_CASE("autocorrelation time: white noise is near 1") {
  RngStream rng(1);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = rng.normal();
  double tau = integrated_autocorr_time(xs);
  CHECK(tau == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("autocorrelation time: AR(1) matches the analytic value") {
  // x_{t+1} = rho x_t + noise has integrated time (1+rho)/(1-rho).
  const double rho = 0.8;
  RngStream rng(2);
  std::vector<double> xs(200000);
  double x = 0;
  for (auto& v : xs) {
    x = rho * x + rng.normal();
    v = x;
  }
  double tau = integrated_autocorr_time(xs);
  CHECK(tau == doctest::Approx((1 + rho) / (1 - rho)).epsilon(0.15));
}

TEST_CASE("autocorrelation time: degenerate series") {
  CHECK(integrated_autocorr_time({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}) == 1.0);
  CHECK(integrated_autocorr_time({1.0, 2.0}) == 1.0);  // too short to estimate
}

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(1000, 4.0) == doctest::Approx(250.0));
  CHECK(effective_sample_size(1000, 1.0) == doctest::Approx(1000.0));
}

TEST_CASE("chi-square tail against closed forms") {
  // dof 2: survival function is exp(-x/2).
  for (double x : {0.5, 1.0, 3.0, 10.0})
    CHECK(chi_square_tail(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-10));
  // Classic 5% critical value for dof 1.
  CHECK(chi_square_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi_square_tail(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("chi-square goodness of fit: exact-match counts give p near 1") {
  std::vector<double> expected = {50, 50, 50, 50};
  ChiSquareResult r = chi_square_gof(expected, expected);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
  CHECK(r.dof == 3);
}

TEST_CASE("chi-square goodness of fit: gross mismatch is rejected") {
  std::vector<double> observed = {100, 0, 0, 100};
  std::vector<double> expected = {50, 50, 50, 50};
  ChiSquareResult r = chi_square_gof(observed, expected);
  CHECK(r.p_value < 1e-6);
}

TEST_CASE("chi-square pooling keeps expected counts above the threshold") {
  // Tiny expected counts in the tail must be pooled, not tested raw.
  std::vector<double> observed = {40, 40, 15, 3, 1, 1};
  std::vector<double> expected = {40, 40, 14, 3, 2, 1};
  ChiSquareResult r = chi_square_gof(observed, expected);
  CHECK(r.pooled_bins < 6);
  CHECK(r.p_value > 0.01);
}

TEST_CASE("poisson pmf") {
  CHECK(poisson_pmf(0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(poisson_pmf(3, 2.0) == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0));
  // Large arguments stay finite (log-space evaluation).
  CHECK(std::isfinite(poisson_pmf(400, 100.0)));
}

TEST_CASE("poisson goodness of fit accepts poisson draws and rejects shifted ones") {
  const double lambda = 5.0;
  RngStream rng(3);
  auto draw_poisson = [&](double lam) {
    // Knuth product method; lam is small here.
    double l = std::exp(-lam), p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= rng.uniform();
    } while (p > l);
    return k - 1;
  };
  const int n = 20000, kmax = 24;
  std::vector<double> good(kmax + 1, 0.0), bad(kmax + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    good[std::min(draw_poisson(lambda), kmax)] += 1;
    bad[std::min(draw_poisson(lambda * 1.15), kmax)] += 1;
  }
  CHECK(chi_square_poisson(good, lambda).p_value > 0.01);
  CHECK(chi_square_poisson(bad, lambda).p_value < 1e-4);
}

TEST_CASE("two-sample KS: identical samples") {
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(ks_two_sample_statistic(a, a) == doctest::Approx(0.0));
  CHECK(ks_two_sample_p(a, a) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("two-sample KS: exact small-sample statistic") {
  // With a = {1,3}, b = {2,4} the empirical CDFs differ by 1/2 maximally.
  std::vector<double> a = {1.0, 3.0}, b = {2.0, 4.0};
  CHECK(ks_two_sample_statistic(a, b) == doctest::Approx(0.5));
}

TEST_CASE("two-sample KS: same law accepted, different law rejected") {
  RngStream rng(4);
  const int n = 4000;
  std::vector<double> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    c[i] = rng.normal() + 0.25;
  }
  CHECK(ks_two_sample_p(a, b) > 0.01);
  CHECK(ks_two_sample_p(a, c) < 1e-6);
}

TEST_CASE("mc report: zero-mean noise passes, a shifted mean fails") {
  RngStream rng(5);
  std::vector<double> centered(5000), shifted(5000);
  for (std::size_t i = 0; i < centered.size(); ++i) {
    centered[i] = rng.normal();
    shifted[i] = rng.normal() + 0.2;
  }
  MCTestReport ok = make_mc_report("centered", centered);
  CHECK(ok.pass);
  CHECK(!ok.inconclusive);
  CHECK(ok.n == 5000);
  CHECK(ok.se > 0.0);
  CHECK(ok.z == doctest::Approx(ok.estimate / ok.se));

  MCTestReport no = make_mc_report("shifted", shifted);
  CHECK(!no.pass);
  CHECK(std::abs(no.z) > 3.0);
}

TEST_CASE("mc report: degenerate series are inconclusive") {
  // Identically-zero residuals: the identity holds exactly, but there is no
  // scatter to attach a statistical verdict to.
  MCTestReport zeros = make_mc_report("zeros", std::vector<double>(100, 0.0));
  CHECK(zeros.pass);
  CHECK(zeros.inconclusive);
  CHECK(zeros.estimate == 0.0);

  // Constant nonzero residuals: exact contradiction of the identity.
  MCTestReport ones = make_mc_report("ones", std::vector<double>(100, 1.0));
  CHECK(!ones.pass);
  CHECK(ones.inconclusive);
}

TEST_CASE("mc report: custom threshold") {
  RngStream rng(6);
  std::vector<double> xs(2000);
  for (auto& x : xs) x = rng.normal() + 0.05;
  MCTestReport strict = make_mc_report("strict", xs, 1e-3);
  CHECK(!strict.pass);
  MCTestReport loose = make_mc_report("loose", xs, 1e6);
  CHECK(loose.pass);
}
