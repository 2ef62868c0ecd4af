#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/stats.hpp"

using namespace gibbsdyn;

namespace {

constexpr double kMinimumSeparation = 1.122462048309373;  // 2^(1/6)

EnergyModel lj_model_1d(double side = 10.0,
                        BoundaryMode mode = BoundaryMode::periodic) {
  return EnergyModel{make_lennard_jones(0.04), make_box(1, side, mode), {}};
}

EnergyModel free_gas_1d(double side = 10.0) {
  return EnergyModel{make_zero_potential(),
                     make_box(1, side, BoundaryMode::periodic),
                     {}};
}

}  // namespace

TEST_CASE("pair energy: small exact cases") {
  EnergyModel m = lj_model_1d();
  CHECK(pair_energy(m, {}) == 0.0);
  CHECK(pair_energy(m, {Vec::of(1.0)}) == 0.0);
  CHECK(pair_energy(m, {Vec::of(0.0), Vec::of(kMinimumSeparation)}) ==
        doctest::Approx(-0.01).epsilon(1e-12));
  // Core overlap and coincidence are infinitely penalised.
  CHECK(pair_energy(m, {Vec::of(0.0), Vec::of(0.1)}) == kInf);
  CHECK(pair_energy(m, {Vec::of(1.0), Vec::of(1.0)}) == kInf);
}

TEST_CASE("pair energy respects the periodic metric") {
  EnergyModel m = lj_model_1d();
  // Distance across the seam is 0.2 + 2^(1/6) - 0.2 ... directly: points at
  // 4.95 and -4.95 sit at box distance 0.1, inside the core.
  CHECK(pair_energy(m, {Vec::of(4.95), Vec::of(-4.95)}) == kInf);
}

TEST_CASE("interaction energy") {
  EnergyModel m = lj_model_1d();
  CHECK(interaction_energy(m, {Vec::of(0.0)}, {}) == 0.0);
  CHECK(interaction_energy(m, {}, {Vec::of(0.0)}) == 0.0);
  CHECK(interaction_energy(m, {Vec::of(0.0)}, {Vec::of(1.0)}) ==
        doctest::Approx(0.0).epsilon(1e-14));

  SUBCASE("additive over the second argument") {
    std::vector<Vec> a = {Vec::of(0.0), Vec::of(2.0)};
    std::vector<Vec> b1 = {Vec::of(0.9)};
    std::vector<Vec> b2 = {Vec::of(-1.3), Vec::of(3.4)};
    std::vector<Vec> both = b1;
    both.insert(both.end(), b2.begin(), b2.end());
    CHECK(interaction_energy(m, a, both) ==
          doctest::Approx(interaction_energy(m, a, b1) +
                          interaction_energy(m, a, b2)).epsilon(1e-14));
  }
}

TEST_CASE("conditional energy") {
  EnergyModel m = lj_model_1d(10.0, BoundaryMode::free);
  SUBCASE("no boundary points: reduces to the pair energy") {
    std::vector<Vec> pts = {Vec::of(0.0), Vec::of(1.5), Vec::of(-2.0)};
    CHECK(conditional_energy(m, pts) == doctest::Approx(pair_energy(m, pts)));
  }
  SUBCASE("no interior points") {
    m.boundary = {Vec::of(6.0)};
    CHECK(conditional_energy(m, {}) == 0.0);
  }
  SUBCASE("one interior and one frozen point") {
    m.boundary = {Vec::of(6.0)};
    std::vector<Vec> pts = {Vec::of(4.8)};
    CHECK(conditional_energy(m, pts) ==
          doctest::Approx(m.pot.value_radial(1.2)).epsilon(1e-12));
  }
}

TEST_CASE("delta energy: exact small cases") {
  EnergyModel m = lj_model_1d(10.0, BoundaryMode::free);

  SUBCASE("insert into an empty box") {
    Configuration cfg = make_configuration(m.box, {});
    CellList cl = build_cell_list(cfg, 2.5);
    Proposal p{Proposal::Kind::insert, Vec::of(1.0), -1};
    CHECK(delta_energy(m, cfg, cl, p) == 0.0);
  }
  SUBCASE("delete the only particle against a frozen boundary point") {
    m.boundary = {Vec::of(6.0)};
    Configuration cfg = make_configuration(m.box, {Vec::of(4.8)});
    CellList cl = build_cell_list(cfg, 2.5);
    Proposal p{Proposal::Kind::remove, Vec(1), 0};
    CHECK(delta_energy(m, cfg, cl, p) ==
          doctest::Approx(-m.pot.value_radial(1.2)).epsilon(1e-12));
  }
  SUBCASE("displacement onto a core overlap is infinite") {
    Configuration cfg = make_configuration(m.box, {Vec::of(0.0), Vec::of(2.0)});
    CellList cl = build_cell_list(cfg, 2.5);
    Proposal p{Proposal::Kind::displace, Vec::of(1.9), 0};
    CHECK(delta_energy(m, cfg, cl, p) == kInf);
  }
}

TEST_CASE("delta energy equals the full recompute on random proposals") {
  EnergyModel m = lj_model_1d();
  SamplerParams params;
  params.z = 0.8;
  params.seed = 21;
  GcmcChain chain(m, params);
  chain.run(30000);  // a realistically filled, equilibrated configuration

  RngStream rng(33);
  int tested = 0;
  Configuration cfg = chain.snapshot();
  while (tested < 1000) {
    CellList cl = build_cell_list(cfg, 2.5);
    double before = conditional_energy(m, cfg.points);
    Proposal p;
    double pick = rng.uniform();
    if (pick < 0.4 || cfg.size() == 0) {
      p.kind = Proposal::Kind::insert;
      p.position = Vec::of(rng.uniform(-5.0, 5.0));
    } else if (pick < 0.7) {
      p.kind = Proposal::Kind::remove;
      p.index = static_cast<int>(rng.uniform_index(cfg.size()));
    } else {
      p.kind = Proposal::Kind::displace;
      p.index = static_cast<int>(rng.uniform_index(cfg.size()));
      p.position = m.box.wrap(
          Vec::of(cfg.points[p.index][0] + rng.normal() * 0.5));
    }
    double dd = delta_energy(m, cfg, cl, p);

    // Apply the proposal and recompute from scratch.
    std::vector<Vec> pts = cfg.points;
    if (p.kind == Proposal::Kind::insert) pts.push_back(p.position);
    else if (p.kind == Proposal::Kind::remove) pts.erase(pts.begin() + p.index);
    else pts[p.index] = p.position;
    double after = conditional_energy(m, pts);

    if (dd == kInf) {
      CHECK(after == kInf);
    } else {
      CHECK(dd == doctest::Approx(after - before).epsilon(1e-9));
      // Move the walk along accepted finite proposals to vary the base state.
      if (min_pair_distance(m.box, pts) > m.box.r_distinct())
        cfg = unchecked_configuration(m.box, pts);
    }
    ++tested;
  }
}

TEST_CASE("acceptance probabilities satisfy the detailed-balance ratio") {
  RngStream rng(8);
  for (int i = 0; i < 200; ++i) {
    double z = rng.uniform(0.1, 2.0);
    double vol = rng.uniform(1.0, 20.0);
    std::size_t n = rng.uniform_index(10);
    double u = rng.uniform(0.2, 1.5);
    double de = rng.uniform(-2.0, 2.0);
    // Insertion into n particles and removal from n+1 are inverse moves; the
    // ratio of their acceptances must equal the target-density ratio times
    // the proposal asymmetry (n+1)/(z V u e^{-dE}) ... i.e.:
    double fwd = insert_acceptance(z, vol, n, u, de);
    double bwd = remove_acceptance(z, vol, n + 1, u, -de);
    double target_ratio = z * vol * u * std::exp(-de) / (static_cast<double>(n) + 1.0);
    CHECK(fwd / bwd == doctest::Approx(target_ratio).epsilon(1e-12));
    CHECK(fwd <= 1.0);
    CHECK(bwd <= 1.0);

    double phi_a = rng.uniform(-1.0, 1.0), phi_b = rng.uniform(-1.0, 1.0);
    double fwd_d = displace_acceptance(phi_a, phi_b, de);
    double bwd_d = displace_acceptance(phi_b, phi_a, -de);
    CHECK(fwd_d / bwd_d ==
          doctest::Approx(std::exp(-(phi_b - phi_a) - de)).epsilon(1e-12));
  }
}

TEST_CASE("two-cell discretisation: the chain kernel is in exact detailed balance") {
  // Discretise the box [-1,1] into two cells with centres -1/2 and 1/2 and at
  // most one particle per cell.  Build the four-state transition matrix from
  // the acceptance functions exactly as the chain composes them, and check
  // pi_i P(i,j) == pi_j P(j,i) to machine precision.
  PairPotential pot = make_power_law(0.1, 3.0);
  const double z = 0.7, vol = 2.0, cell = 1.0;
  const double u = boltzmann(pot.value_radial(0.5));   // one-body weight
  const double phi1 = pot.value_radial(0.5);           // one-body energy
  const double e_pair = pot.value_radial(1.0);         // cells interact at r=1
  const double p_ins = 1.0 / 3, p_rem = 1.0 / 3, p_dis = 1.0 / 3;

  enum { S0, SL, SR, S2 };
  double pi[4] = {
      1.0,
      z * cell * u,
      z * cell * u,
      z * z * cell * cell * u * u * std::exp(-e_pair),
  };

  double P[4][4] = {};
  // Insertions: uniform position proposal lands in either cell with mass 1/2.
  P[S0][SL] = p_ins * 0.5 * insert_acceptance(z, vol, 0, u, 0.0);
  P[S0][SR] = p_ins * 0.5 * insert_acceptance(z, vol, 0, u, 0.0);
  P[SL][S2] = p_ins * 0.5 * insert_acceptance(z, vol, 1, u, e_pair);
  P[SR][S2] = p_ins * 0.5 * insert_acceptance(z, vol, 1, u, e_pair);
  // Removals: uniform particle choice.
  P[SL][S0] = p_rem * remove_acceptance(z, vol, 1, u, 0.0);
  P[SR][S0] = p_rem * remove_acceptance(z, vol, 1, u, 0.0);
  P[S2][SL] = p_rem * 0.5 * remove_acceptance(z, vol, 2, u, -e_pair);
  P[S2][SR] = p_rem * 0.5 * remove_acceptance(z, vol, 2, u, -e_pair);
  // Displacements: propose the other cell (symmetric proposal).
  P[SL][SR] = p_dis * displace_acceptance(phi1, phi1, 0.0);
  P[SR][SL] = p_dis * displace_acceptance(phi1, phi1, 0.0);

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(pi[i] * P[i][j] == doctest::Approx(pi[j] * P[j][i]).epsilon(1e-14));
}

TEST_CASE("chain invariant: cached energy tracks the full recompute") {
  EnergyModel m = lj_model_1d();
  m.boundary = {Vec::of(5.3)};  // a frozen point just outside
  SamplerParams params;
  params.z = 0.8;
  params.seed = 5;
  GcmcChain chain(m, params);
  for (int block = 0; block < 20; ++block) {
    chain.run(1000);
    double cached = chain.cached_energy();
    double fresh = chain.recompute_energy();
    CHECK(cached == doctest::Approx(fresh).epsilon(1e-9));
  }
  // The chain proposes all three move kinds.
  const AcceptanceCounters& c = chain.counters();
  for (int k = 0; k < 3; ++k) {
    CHECK(c.proposed[k] > 0);
    CHECK(c.accepted[k] <= c.proposed[k]);
  }
}

TEST_CASE("chain: vanishing activity empties the box") {
  EnergyModel m = lj_model_1d();
  SamplerParams params;
  params.z = 1e-6;
  params.seed = 9;
  GcmcChain chain(m, params);
  chain.run(50000);
  CHECK(chain.size() <= 1);
}

TEST_CASE("chain: particle cap is a hard resource guard") {
  EnergyModel m = free_gas_1d();
  SamplerParams params;
  params.z = 50.0;  // would equilibrate near 500 particles uncapped
  params.max_particles = 16;
  params.seed = 11;
  GcmcChain chain(m, params);
  chain.run(20000);
  CHECK(chain.size() <= 16);
}

TEST_CASE("chain: determinism under a fixed seed") {
  EnergyModel m = lj_model_1d();
  SamplerParams params;
  params.z = 0.5;
  params.seed = 77;
  GcmcChain a(m, params), b(m, params);
  a.run(5000);
  b.run(5000);
  CHECK(hash_configuration(a.snapshot()) == hash_configuration(b.snapshot()));
}

TEST_CASE("sample_ensemble: shape and diagnostics") {
  EnergyModel m = free_gas_1d();
  SamplerParams params;
  params.z = 0.8;
  params.seed = 1;
  params.burn_in = 2000;

  SUBCASE("a single sample") {
    Ensemble ens = sample_ensemble(m, params, 1);
    CHECK(ens.samples.size() == 1);
  }
  SUBCASE("free gas: mean count matches the analytic law") {
    Ensemble ens = sample_ensemble(m, params, 4000);
    REQUIRE(ens.samples.size() == 4000);
    std::vector<double> counts;
    counts.reserve(ens.samples.size());
    for (const auto& g : ens.samples) counts.push_back(static_cast<double>(g.size()));
    MeanSE ms = mean_se(counts);
    double lambda = params.z * m.box.volume();  // 8
    double tau = ens.diag.tau_count;
    double se = ms.se * std::sqrt(tau);  // guard against residual correlation
    CHECK(std::abs(ms.mean - lambda) <= 3.0 * se);
    CHECK(ens.diag.ess > 100.0);
    CHECK(ens.diag.thinning >= 1);
  }
}

TEST_CASE("sample_ensemble: interacting mean density (reported)") {
  EnergyModel lj = lj_model_1d();
  SamplerParams params;
  params.z = 0.5;
  params.seed = 3;
  Ensemble ens = sample_ensemble(lj, params, 2000);
  double mean = 0;
  for (const auto& g : ens.samples) mean += static_cast<double>(g.size());
  mean /= static_cast<double>(ens.samples.size());
  // Informational: how the interacting density compares with the free gas at
  // the same activity (z |box| = 5).  Not asserted; the direction depends on
  // the balance of core exclusion and attractive wells at this temperature.
  MESSAGE("interacting mean count ", mean, " vs free-gas 5");
  CHECK(mean > 0.0);
}

TEST_CASE("correlation estimates for the free gas are flat") {
  EnergyModel m = free_gas_1d();
  SamplerParams params;
  params.z = 0.7;
  params.seed = 13;
  Ensemble ens = sample_ensemble(m, params, 3000);

  RhoEstimate rho1 = estimate_rho(ens.samples, m, 1, 8);
  REQUIRE(rho1.value.size() == 8);
  REQUIRE(rho1.edges.size() == 9);
  for (std::size_t b = 0; b < rho1.value.size(); ++b) {
    CHECK(rho1.denom[b] > 0.0);
    CHECK(std::abs(rho1.value[b] - params.z) <= 4.0 * rho1.se[b]);
  }

  RhoEstimate rho2 = estimate_rho(ens.samples, m, 2, 6);
  for (std::size_t b = 0; b < rho2.value.size(); ++b)
    CHECK(std::abs(rho2.value[b] - params.z * params.z) <= 4.0 * rho2.se[b]);
}

TEST_CASE("pair correlation vanishes inside the interaction core") {
  EnergyModel m = lj_model_1d();
  SamplerParams params;
  params.z = 0.5;
  params.seed = 17;
  Ensemble ens = sample_ensemble(m, params, 2000);
  RhoEstimate rho2 = estimate_rho(ens.samples, m, 2, 12);
  // First shell [0, ~0.4): entirely inside the hard core.
  CHECK(rho2.value[0] == 0.0);
}

TEST_CASE("ruelle bound check") {
  EnergyModel m = free_gas_1d();
  SamplerParams params;
  params.z = 0.7;
  params.seed = 19;
  Ensemble ens = sample_ensemble(m, params, 2000);
  RhoEstimate rho1 = estimate_rho(ens.samples, m, 1, 8);
  RhoEstimate rho2 = estimate_rho(ens.samples, m, 2, 6);

  CHECK(ruelle_check(rho1, rho2, 2 * params.z).verdict == Verdict::pass);
  CHECK(ruelle_check(rho1, rho2, params.z / 2).verdict == Verdict::fail);

  SUBCASE("a near-empty run passes for any positive constant") {
    SamplerParams tiny = params;
    tiny.z = 1e-4;
    Ensemble sparse = sample_ensemble(m, tiny, 500);
    RhoEstimate r1 = estimate_rho(sparse.samples, m, 1, 4);
    RhoEstimate r2 = estimate_rho(sparse.samples, m, 2, 4);
    CHECK(ruelle_check(r1, r2, 0.05).verdict == Verdict::pass);
  }
}

TEST_CASE("one-body reference mass") {
  EnergyModel fg = free_gas_1d();
  CHECK(one_body_mass(fg) == doctest::Approx(fg.box.volume()).epsilon(1e-9));
  EnergyModel lj = lj_model_1d();
  double mass = one_body_mass(lj);
  // The soft wall keeps e^{-phi} near zero out to r ~ 0.75 on both sides of
  // the origin, so a bit over 1.5 units of length disappear.
  CHECK(mass < lj.box.volume() - 1.2);
  CHECK(mass > lj.box.volume() - 2.0);
}

TEST_CASE("clipped ball volume") {
  CHECK(clipped_ball_volume(1, 0.5, 2.0) == doctest::Approx(1.0));
  CHECK(clipped_ball_volume(1, 3.0, 2.0) == doctest::Approx(4.0));
  const double pi = 3.141592653589793;
  CHECK(clipped_ball_volume(2, 1.0, 2.0) == doctest::Approx(pi).epsilon(1e-6));
  CHECK(clipped_ball_volume(2, 10.0, 2.0) == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(clipped_ball_volume(3, 1.0, 2.0) ==
        doctest::Approx(4.0 * pi / 3.0).epsilon(1e-6));
}
