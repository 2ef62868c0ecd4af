// Combinatorial harmonic analysis on finite configurations: the K-transform
// (sum over finite sub-configurations), the star-convolution it turns into a
// product, and Monte Carlo integrals against the one-body reference measure.
#pragma once

#include <functional>
#include <vector>

#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/stats.hpp"

namespace gibbsdyn {

// Enumeration guards: these operations are exponential in the configuration
// size, so they refuse inputs past these limits with ResourceLimitError.
inline constexpr int kMaxKTransformPoints = 20;   // 2^20 subsets
inline constexpr int kMaxStarPoints = 12;         // 3^12 ordered splits
inline constexpr int kMaxLPSector = 6;

// A function of finite point sets, vanishing above n_max points.  The
// callable must be symmetric in its arguments; evaluation canonicalises the
// order, so set semantics hold regardless.
struct FiniteConfigFunction {
  int n_max = 0;
  std::function<double(const std::vector<Vec>&)> fn;

  double operator()(std::vector<Vec> pts) const;
};

// (KG)(gamma) = sum over all finite subsets eta of gamma of G(eta), the empty
// set included.  |gamma| may not exceed kMaxKTransformPoints.
double k_transform(const FiniteConfigFunction& g, const Configuration& gamma);

// Star convolution: (G1 * G2)(eta) = sum over ordered partitions of eta into
// three disjoint parts (e1, e2, e3) of G1(e1 + e2) G2(e2 + e3).  The returned
// function enforces the kMaxStarPoints guard at evaluation time.
FiniteConfigFunction star_convolution(FiniteConfigFunction g1, FiniteConfigFunction g2);

// K(G1 * G2)(gamma) - KG1(gamma) KG2(gamma); identically zero in exact
// arithmetic.
double k_homomorphism_residual(const FiniteConfigFunction& g1,
                               const FiniteConfigFunction& g2,
                               const Configuration& gamma);

// ---------------------------------------------------------------------------
// Integrals against the activity-weighted one-body reference measure
//   sum_n (z^n / n!) int_{Lambda^n} G(x_1..x_n) prod u(x_i) dx,
// truncated at max_sector (<= kMaxLPSector) and at G.n_max.  Every sector is
// estimated by Monte Carlo with points drawn from u(x)dx by rejection; the
// empty sector is exact.
// ---------------------------------------------------------------------------
struct LPIntegralResult {
  double value = 0;
  double se = 0;
  std::vector<double> sector_value;  // per-sector contributions, 0..max_sector
};

LPIntegralResult lp_integral(const FiniteConfigFunction& g, const EnergyModel& model,
                             double z, int max_sector, std::size_t samples_per_sector,
                             std::uint64_t seed);

// Paired Monte Carlo check of the correlation identity: the ensemble average
// of (KG)(gamma) equals the integral of G against the binned correlation
// estimates.  Supports G with n_max <= 2 (std::invalid_argument otherwise).
// The per-sample residual couples the K-transform with the same sample's bin
// counts, so the test statistic is exactly mean/se of one paired series.
MCTestReport correlation_identity_check(const FiniteConfigFunction& g,
                                        const std::vector<Configuration>& samples,
                                        const EnergyModel& model, int nbins);

}  // namespace gibbsdyn
