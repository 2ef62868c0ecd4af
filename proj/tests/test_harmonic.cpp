#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gibbsdyn/harmonic.hpp"
#include "gibbsdyn/rng.hpp"

using namespace gibbsdyn;

namespace {

// The indicator of the empty configuration.
FiniteConfigFunction empty_indicator() {
  return {0, [](const std::vector<Vec>& pts) { return pts.empty() ? 1.0 : 0.0; }};
}

// Supported on singletons: G({x}) = h(x), zero elsewhere.
FiniteConfigFunction singleton_lift(std::function<double(const Vec&)> h) {
  return {1, [h = std::move(h)](const std::vector<Vec>& pts) {
            return pts.size() == 1 ? h(pts[0]) : 0.0;
          }};
}

// A reproducible pseudo-random symmetric function of at most n_max points:
// products and sums of smooth per-point features with fixed coefficients.
FiniteConfigFunction random_function(int n_max, std::uint64_t seed) {
  RngStream rng(seed);
  double a = rng.uniform(-1.0, 1.0);
  double b = rng.uniform(-1.0, 1.0);
  double c = rng.uniform(0.2, 1.5);
  double d = rng.uniform(-0.5, 0.5);
  return {n_max, [=](const std::vector<Vec>& pts) {
            double sum = a, prod = 1.0;
            for (const auto& p : pts) {
              double r2 = p.norm2();
              sum += b * std::exp(-c * r2);
              prod *= 1.0 + d * std::cos(r2);
            }
            return sum * prod;
          }};
}

Configuration random_gamma(const Box& box, std::size_t n, RngStream& rng) {
  std::vector<Vec> pts;
  while (pts.size() < n) {
    Vec x(box.dim);
    for (int k = 0; k < box.dim; ++k) x[k] = rng.uniform(-box.half(), box.half());
    bool ok = true;
    for (const auto& p : pts)
      if (box.distance(p, x) <= box.r_distinct()) ok = false;
    if (ok) pts.push_back(x);
  }
  return make_configuration(box, std::move(pts));
}

}  // namespace

TEST_CASE("finite-configuration functions vanish above their support size") {
  FiniteConfigFunction g = random_function(2, 1);
  CHECK(g({Vec::of(0.1), Vec::of(0.4), Vec::of(0.9)}) == 0.0);
  CHECK(g({Vec::of(0.1), Vec::of(0.4)}) != 0.0);
}

TEST_CASE("k-transform: empty-set indicator sums to one") {
  Box box = make_box(1, 10.0, BoundaryMode::free);
  RngStream rng(2);
  for (std::size_t n : {0u, 1u, 4u, 7u}) {
    Configuration gamma = random_gamma(box, n, rng);
    CHECK(k_transform(empty_indicator(), gamma) == 1.0);
  }
}

TEST_CASE("k-transform: singleton support reduces to the one-body sum") {
  Box box = make_box(1, 10.0, BoundaryMode::free);
  auto h = [](const Vec& x) { return std::sin(x[0]) + 0.3 * x[0]; };
  RngStream rng(3);
  Configuration gamma = random_gamma(box, 6, rng);
  double expect = 0.0;
  for (const auto& p : gamma.points) expect += h(p);
  CHECK(k_transform(singleton_lift(h), gamma) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("k-transform: three points against the explicit subset sum") {
  Box box = make_box(1, 10.0, BoundaryMode::free);
  FiniteConfigFunction g = random_function(2, 4);
  Vec a = Vec::of(-1.0), b = Vec::of(0.5), c = Vec::of(2.0);
  Configuration gamma = make_configuration(box, {a, b, c});
  // Subsets of size <= 2: empty, three singletons, three pairs — 7 terms.
  double expect = g({}) + g({a}) + g({b}) + g({c}) + g({a, b}) + g({a, c}) + g({b, c});
  CHECK(k_transform(g, gamma) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("k-transform refuses configurations past the enumeration guard") {
  Box box = make_box(1, 100.0, BoundaryMode::free);
  std::vector<Vec> pts;
  for (int i = 0; i < kMaxKTransformPoints + 1; ++i)
    pts.push_back(Vec::of(-40.0 + i));
  Configuration gamma = make_configuration(box, std::move(pts));
  CHECK_THROWS_AS(k_transform(random_function(2, 5), gamma), ResourceLimitError);
}

TEST_CASE("star convolution: empty argument") {
  FiniteConfigFunction g1 = random_function(2, 6);
  FiniteConfigFunction g2 = random_function(2, 7);
  FiniteConfigFunction s = star_convolution(g1, g2);
  // The only 3-split of the empty set is (0,0,0).
  CHECK(s({}) == doctest::Approx(g1({}) * g2({})).epsilon(1e-14));
}

TEST_CASE("star convolution: singleton expands to three terms") {
  FiniteConfigFunction g1 = random_function(2, 8);
  FiniteConfigFunction g2 = random_function(2, 9);
  FiniteConfigFunction s = star_convolution(g1, g2);
  Vec x = Vec::of(0.7);
  double expect = g1({x}) * g2({}) + g1({x}) * g2({x}) + g1({}) * g2({x});
  CHECK(s({x}) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("star convolution: commutative and guarded") {
  FiniteConfigFunction g1 = random_function(3, 10);
  FiniteConfigFunction g2 = random_function(2, 11);
  FiniteConfigFunction ab = star_convolution(g1, g2);
  FiniteConfigFunction ba = star_convolution(g2, g1);
  RngStream rng(12);
  for (int n = 0; n <= 4; ++n) {
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) pts.push_back(Vec::of(rng.uniform(-3.0, 3.0)));
    CHECK(ab(pts) == doctest::Approx(ba(pts)).epsilon(1e-12));
  }
  std::vector<Vec> big;
  for (int i = 0; i < kMaxStarPoints + 1; ++i) big.push_back(Vec::of(0.1 * i));
  // Points beyond the support bound vanish before the enumeration guard can
  // fire; the guard protects the case where the bound itself is generous.
  CHECK(ab(big) == 0.0);
  FiniteConfigFunction wide = star_convolution(random_function(7, 14), random_function(7, 15));
  CHECK_THROWS_AS(wide(big), ResourceLimitError);
}

TEST_CASE("the k-transform turns star convolution into a product") {
  Box box = make_box(1, 10.0, BoundaryMode::free);
  RngStream rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    FiniteConfigFunction g1 = random_function(1 + trial % 3, 100 + trial);
    FiniteConfigFunction g2 = random_function(1 + (trial / 3) % 3, 200 + trial);
    Configuration gamma = random_gamma(box, rng.uniform_index(7), rng);
    double residual = k_homomorphism_residual(g1, g2, gamma);
    double scale = std::abs(k_transform(g1, gamma) * k_transform(g2, gamma)) + 1.0;
    CHECK(std::abs(residual) / scale < 1e-12);
  }
  // Exact special cases.
  Configuration empty = make_configuration(box, {});
  CHECK(k_homomorphism_residual(random_function(2, 300), random_function(2, 301),
                                empty) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(k_homomorphism_residual(empty_indicator(), empty_indicator(),
                                random_gamma(box, 4, rng)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("reference-measure integral: empty-set indicator is exactly one") {
  EnergyModel m{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
  LPIntegralResult r = lp_integral(empty_indicator(), m, 0.8, 4, 2000, 1);
  CHECK(r.value == 1.0);
  CHECK(r.se == 0.0);
  CHECK(r.sector_value[0] == 1.0);
}

TEST_CASE("reference-measure integral: singleton sector against quadrature") {
  EnergyModel m{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
  const double z = 0.6;
  // G = h on singletons; the integral is z * int h(x) dx, exactly computable
  // for h(x) = cos(pi x / 10): integral over [-5,5] is 20/pi.
  auto h = [](const Vec& x) { return std::cos(3.141592653589793 * x[0] / 10.0); };
  LPIntegralResult r = lp_integral(singleton_lift(h), m, z, 3, 40000, 2);
  double expect = z * 20.0 / 3.141592653589793;
  CHECK(std::abs(r.value - expect) <= 4.0 * r.se + 1e-9);
  CHECK(r.se > 0.0);
}

TEST_CASE("reference-measure integral: two-point sector of the indicator") {
  // G = indicator of |eta| = 2 integrates to sigma(Lambda)^2 / 2.
  EnergyModel m{make_zero_potential(), make_box(1, 7.0, BoundaryMode::periodic), {}};
  const double z = 0.45;
  FiniteConfigFunction pair_ind{
      2, [](const std::vector<Vec>& pts) { return pts.size() == 2 ? 1.0 : 0.0; }};
  LPIntegralResult r = lp_integral(pair_ind, m, z, 4, 1000, 3);
  double sigma = z * 7.0;
  // For the free gas the two-point sector has a constant integrand, so the
  // Monte Carlo average is exact up to roundoff regardless of sample count.
  CHECK(r.value == doctest::Approx(sigma * sigma / 2.0).epsilon(1e-6));
}

TEST_CASE("reference-measure integral guards its sector count") {
  EnergyModel m{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
  CHECK_THROWS_AS(
      lp_integral(empty_indicator(), m, 1.0, kMaxLPSector + 1, 10, 1),
      ResourceLimitError);
}

TEST_CASE("correlation identity: empty-set indicator is exact on both sides") {
  EnergyModel m{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
  SamplerParams params;
  params.z = 0.7;
  params.seed = 4;
  Ensemble ens = sample_ensemble(m, params, 400);
  MCTestReport rep = correlation_identity_check(empty_indicator(), ens.samples, m, 6);
  CHECK(rep.pass);
  CHECK(rep.estimate == doctest::Approx(0.0));
}

TEST_CASE("correlation identity: one-body function under the free gas") {
  EnergyModel m{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
  SamplerParams params;
  params.z = 0.7;
  params.seed = 5;
  Ensemble ens = sample_ensemble(m, params, 3000);
  auto h = [](const Vec& x) { return std::exp(-0.3 * x[0] * x[0]); };
  MCTestReport rep = correlation_identity_check(singleton_lift(h), ens.samples, m, 8);
  CHECK(rep.pass);
  CHECK(rep.n == 3000);
}

TEST_CASE("correlation identity: one-body function under interaction") {
  EnergyModel m{make_lennard_jones(0.04), make_box(1, 10.0, BoundaryMode::periodic), {}};
  SamplerParams params;
  params.z = 0.5;
  params.seed = 6;
  Ensemble ens = sample_ensemble(m, params, 3000);
  auto h = [](const Vec& x) { return std::cos(0.4 * x[0]); };
  MCTestReport rep = correlation_identity_check(singleton_lift(h), ens.samples, m, 8);
  CHECK(rep.pass);

  // Functions seeing pairs are supported too (n_max = 2), larger refused.
  FiniteConfigFunction pairs = random_function(2, 50);
  CHECK_NOTHROW(correlation_identity_check(pairs, ens.samples, m, 4));
  FiniteConfigFunction triples = random_function(3, 51);
  CHECK_THROWS_AS(correlation_identity_check(triples, ens.samples, m, 4),
                  std::invalid_argument);
}
