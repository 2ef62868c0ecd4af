#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gibbsdyn/probes.hpp"
#include "gibbsdyn/verify.hpp"

using namespace gibbsdyn;

namespace {

EnergyModel lj_model_1d(BoundaryMode mode) {
  return EnergyModel{make_lennard_jones(0.04), make_box(1, 10.0, mode), {}};
}

EnergyModel free_gas_1d() {
  return EnergyModel{make_zero_potential(), make_box(1, 10.0, BoundaryMode::periodic), {}};
}

// Shared ensembles: sampled once, reused across the cases below.
const Ensemble& lj_ensemble() {
  static Ensemble ens = [] {
    SamplerParams p;
    p.z = 0.5;
    p.seed = 2024;
    return sample_ensemble(lj_model_1d(BoundaryMode::periodic), p, 50000);
  }();
  return ens;
}

const Ensemble& free_gas_ensemble() {
  static Ensemble ens = [] {
    SamplerParams p;
    p.z = 0.8;
    p.seed = 515;
    return sample_ensemble(free_gas_1d(), p, 20000);
  }();
  return ens;
}

const Ensemble& lj_free_box_ensemble() {
  static Ensemble ens = [] {
    SamplerParams p;
    p.z = 0.5;
    p.seed = 9090;
    return sample_ensemble(lj_model_1d(BoundaryMode::free), p, 20000);
  }();
  return ens;
}

Ensemble take(const Ensemble& ens, std::size_t count) {
  Ensemble out;
  out.diag = ens.diag;
  out.samples.assign(ens.samples.begin(),
                     ens.samples.begin() + static_cast<std::ptrdiff_t>(
                                               std::min(count, ens.samples.size())));
  return out;
}

CylinderFunction constant_cylinder(const Box& box, double c) {
  return CylinderFunction{outer_constant(c, 1),
                          {make_bump(Vec::zero(box.dim), 0.5 * box.half(), 1.0)}};
}

}  // namespace

TEST_CASE("first-order integration by parts") {
  const Box box = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(box);

  SUBCASE("requires a minimally sized ensemble") {
    SamplerParams p;
    p.z = 0.3;
    p.seed = 3;
    p.burn_in = 500;
    p.thinning = 1;
    Ensemble tiny = sample_ensemble(free_gas_1d(), p, 999);
    CHECK_THROWS_AS(test_ibp(probes.F_a, probes.G_a, probes.v_a, tiny,
                             make_zero_potential(), DriftSign::minus),
                    std::invalid_argument);
  }
  SUBCASE("no particles where the field lives: degenerate but consistent") {
    SamplerParams p;
    p.z = 1e-8;  // essentially always the empty configuration
    p.seed = 4;
    p.thinning = 1;
    Ensemble empty_ens = sample_ensemble(free_gas_1d(), p, 1500);
    MCTestReport rep = test_ibp(probes.F_a, probes.G_a, probes.v_a, empty_ens,
                                make_zero_potential(), DriftSign::minus);
    CHECK(rep.pass);
    CHECK(rep.inconclusive);
    CHECK(rep.estimate == 0.0);
  }
  SUBCASE("free gas: holds under either sign convention (no force to see)") {
    for (DriftSign s : {DriftSign::plus, DriftSign::minus}) {
      MCTestReport rep = test_ibp(probes.F_a, probes.G_a, probes.v_a,
                                  free_gas_ensemble(), make_zero_potential(), s);
      CHECK(rep.pass);
      CHECK_FALSE(rep.inconclusive);
    }
  }
  SUBCASE("interacting ensemble separates the sign conventions") {
    MCTestReport good = test_ibp(probes.F_a, probes.G_a, probes.v_a,
                                 lj_ensemble(), make_lennard_jones(0.04),
                                 DriftSign::minus);
    MCTestReport bad = test_ibp(probes.F_a, probes.G_a, probes.v_a,
                                lj_ensemble(), make_lennard_jones(0.04),
                                DriftSign::plus);
    MESSAGE("resolved |z| = ", std::abs(good.z), ", flipped |z| = ", std::abs(bad.z));
    CHECK(good.pass);
    CHECK_FALSE(bad.pass);
  }
}

TEST_CASE("translation integration by parts") {
  const Box box = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(box);
  PairPotential lj = make_lennard_jones(0.04);

  SUBCASE("constant functionals give an exactly zero residual") {
    CylinderFunction c1 = constant_cylinder(box, 2.0);
    MCTestReport rep = test_ibp_translation(c1, probes.G_a,
                                            take(free_gas_ensemble(), 2000),
                                            make_zero_potential());
    CHECK(rep.pass);
    CHECK(rep.inconclusive);
    CHECK(rep.estimate == 0.0);
  }
  SUBCASE("free gas on the torus") {
    MCTestReport rep = test_ibp_translation(probes.F_a, probes.G_a,
                                            free_gas_ensemble(), make_zero_potential());
    CHECK(rep.pass);
    CHECK_FALSE(rep.inconclusive);
  }
  SUBCASE("interacting ensemble on the torus") {
    MCTestReport rep = test_ibp_translation(probes.F_a, probes.G_a,
                                            lj_ensemble(), lj);
    MESSAGE("translation |z| = ", std::abs(rep.z));
    CHECK(rep.pass);
  }
  SUBCASE("the extra term equals the difference of the two generators") {
    RngStream rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vec> pts;
      std::size_t n = 1 + trial % 4;
      while (pts.size() < n) {
        Vec x = Vec::of(rng.uniform(-4.0, 4.0));
        bool ok = std::abs(x[0]) > 0.6;
        for (const auto& p : pts)
          if (std::abs(p[0] - x[0]) < 0.6) ok = false;
        if (ok) pts.push_back(x);
      }
      Configuration gamma = make_configuration(box, pts);
      double extra = moving_frame_extra(lj, probes.F_a, gamma);
      double diff = generator_moving_frame(lj, probes.F_a, gamma, DriftSign::minus) -
                    generator_fixed_frame(lj, probes.F_a, gamma, DriftSign::minus);
      CHECK(extra == doctest::Approx(diff).epsilon(1e-11));
    }
  }
  SUBCASE("free box walls break the identity: reported for information") {
    // Unlike the torus, the free box is not translation invariant; mass can
    // pile against a wall and the residual picks up a boundary flux.
    MCTestReport rep = test_ibp_translation(probes.F_a, probes.G_a,
                                            lj_free_box_ensemble(), lj);
    MESSAGE("free-box translation z = ", rep.z, " (pass=", rep.pass, ")");
    CHECK(rep.n == lj_free_box_ensemble().samples.size());
  }
}

TEST_CASE("Dirichlet-form / generator duality") {
  const Box box = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(box);
  PairPotential lj = make_lennard_jones(0.04);

  SUBCASE("constant functionals: both sides vanish identically") {
    CylinderFunction c1 = constant_cylinder(box, 1.0);
    MCTestReport rep = test_dirichlet(DirichletForm::gsdad, c1, c1,
                                      take(free_gas_ensemble(), 2000),
                                      make_zero_potential(), DriftSign::minus);
    CHECK(rep.pass);
    CHECK(rep.inconclusive);
  }
  SUBCASE("free gas, pinned-origin form") {
    MCTestReport rep = test_dirichlet(DirichletForm::gsdad, probes.F_a, probes.G_a,
                                      free_gas_ensemble(), make_zero_potential(),
                                      DriftSign::minus);
    CHECK(rep.pass);
    CHECK_FALSE(rep.inconclusive);
  }
  SUBCASE("interacting ensemble, all three forms") {
    MCTestReport a = test_dirichlet(DirichletForm::gsdad, probes.F_a, probes.G_a,
                                    lj_ensemble(), lj, DriftSign::minus);
    MCTestReport b = test_dirichlet(DirichletForm::env, probes.F_b, probes.G_b,
                                    lj_ensemble(), lj, DriftSign::minus);
    MCTestReport c = test_dirichlet(probes.tF, probes.tG, lj_ensemble(), lj,
                                    DriftSign::minus, 99);
    MESSAGE("dirichlet z: ", a.z, " ", b.z, " ", c.z);
    CHECK(a.pass);
    CHECK(b.pass);
    CHECK(c.pass);
  }
  SUBCASE("the coupled form needs the tagged overload") {
    CHECK_THROWS_AS(test_dirichlet(DirichletForm::coup, probes.F_a, probes.G_a,
                                   take(free_gas_ensemble(), 2000),
                                   make_zero_potential(), DriftSign::minus),
                    std::invalid_argument);
  }
}

TEST_CASE("generator symmetry on the interacting ensemble") {
  const Box box = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(box);
  PairPotential lj = make_lennard_jones(0.04);
  MCTestReport a = test_symmetry(DirichletForm::gsdad, probes.F_b, probes.G_b,
                                 lj_ensemble(), lj, DriftSign::minus);
  MCTestReport b = test_symmetry(DirichletForm::env, probes.F_a, probes.G_a,
                                 lj_ensemble(), lj, DriftSign::minus);
  MCTestReport c = test_symmetry(probes.tF, probes.tG, lj_ensemble(), lj,
                                 DriftSign::minus, 17);
  MESSAGE("symmetry z: ", a.z, " ", b.z, " ", c.z);
  CHECK(a.pass);
  CHECK(b.pass);
  CHECK(c.pass);
}

TEST_CASE("the ten-identity battery") {
  SUBCASE("free gas: every statistical identity holds") {
    auto reports = identity_suite(free_gas_ensemble(), make_zero_potential(),
                                  DriftSign::minus, 11);
    REQUIRE(reports.size() == 10);
    std::set<std::string> ids;
    int passed = 0;
    for (const auto& r : reports) {
      ids.insert(r.id);
      if (r.pass) ++passed;
      MESSAGE(r.id, ": z=", r.z, " pass=", r.pass);
    }
    CHECK(ids.size() == 10);  // distinct identities
    CHECK(ids.count("ibp_a") == 1);
    CHECK(ids.count("ibp_translation_b") == 1);
    CHECK(ids.count("dirichlet_coup") == 1);
    CHECK(ids.count("symmetry_env") == 1);
    CHECK(passed >= 9);
  }
  SUBCASE("interacting ensemble under the resolved convention") {
    auto reports = identity_suite(lj_ensemble(), make_lennard_jones(0.04),
                                  DriftSign::minus, 12);
    int passed = 0;
    for (const auto& r : reports) {
      if (r.pass) ++passed;
      MESSAGE(r.id, ": z=", r.z, " pass=", r.pass);
    }
    CHECK(passed >= 9);
  }
}

TEST_CASE("invariance under the flow") {
  PairPotential zero = make_zero_potential();
  PairPotential lj = make_lennard_jones(0.04);
  const Box pbox = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(pbox);

  SUBCASE("zero steps: the observable cannot move") {
    IntegratorParams p;
    p.dt = 1e-3;
    p.wall = IntegratorParams::Wall::wrap;
    MCTestReport rep = test_invariance(observe(probes.F_a), System::gsd,
                                       take(free_gas_ensemble(), 300), zero, p, 0, 5);
    CHECK(rep.pass);
    CHECK(rep.inconclusive);
    CHECK(rep.estimate == 0.0);
  }
  SUBCASE("free diffusion preserves its sampled law") {
    IntegratorParams p;
    p.dt = 1e-3;
    p.wall = IntegratorParams::Wall::wrap;
    MCTestReport rep = test_invariance(observe(probes.F_a), System::gsd,
                                       take(free_gas_ensemble(), 2000), zero, p, 100, 6);
    MESSAGE("free-gas invariance z = ", rep.z, " avg_z = ", rep.meta.at("avg_z"));
    CHECK(rep.pass);
  }
  SUBCASE("pinned-origin dynamics preserves the interacting law (reflecting box)") {
    IdentityProbes fprobes = standard_probes(make_box(1, 10.0, BoundaryMode::free));
    IntegratorParams p;
    p.dt = 1e-4;
    p.wall = IntegratorParams::Wall::reflect;
    MCTestReport rep = test_invariance(observe(fprobes.F_a), System::gsdad,
                                       take(lj_free_box_ensemble(), 2000), lj, p,
                                       1000, 7);
    MESSAGE("gsdad invariance z = ", rep.z, " avg_z = ", rep.meta.at("avg_z"),
            " rejections = ", rep.meta.at("rejection_rate"));
    CHECK(rep.pass);
  }
}

TEST_CASE("martingale property along paths") {
  PairPotential zero = make_zero_potential();
  PairPotential lj = make_lennard_jones(0.04);
  const Box pbox = make_box(1, 10.0, BoundaryMode::periodic);
  IdentityProbes probes = standard_probes(pbox);
  IntegratorParams p;
  p.dt = 1e-3;
  p.wall = IntegratorParams::Wall::wrap;

  SUBCASE("at time zero the statistic is identically zero") {
    auto reps = test_martingale(probes.F_a, System::env,
                                take(free_gas_ensemble(), 500), zero,
                                DriftSign::minus, p, {0.0}, 21);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].pass);
    CHECK(reps[0].inconclusive);
    CHECK(reps[0].estimate == 0.0);
  }
  SUBCASE("free gas, environment process") {
    auto reps = test_martingale(probes.F_a, System::env,
                                take(free_gas_ensemble(), 1500), zero,
                                DriftSign::minus, p, {0.02, 0.05}, 22);
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
      MESSAGE(r.id, ": z=", r.z);
      CHECK(r.pass);
    }
  }
  SUBCASE("interacting ensemble, coupled product functional") {
    IntegratorParams fine = p;
    fine.dt = 2e-4;
    auto reps = test_martingale(probes.tF, take(lj_ensemble(), 1200), lj,
                                DriftSign::minus, fine, {0.02}, 23);
    REQUIRE(reps.size() == 1);
    MESSAGE("coupled martingale z = ", reps[0].z,
            " rejections = ", reps[0].meta.at("rejection_rate"));
    CHECK(reps[0].pass);
  }
  SUBCASE("the plain pair system has no generator here") {
    CHECK_THROWS_AS(test_martingale(probes.F_a, System::gsd,
                                    take(free_gas_ensemble(), 500), zero,
                                    DriftSign::minus, p, {0.01}, 24),
                    std::invalid_argument);
  }
}

TEST_CASE("sign resolution") {
  SUBCASE("the interacting ensemble identifies the resolved convention") {
    SignResolution res = resolve_sign_conventions(lj_ensemble(),
                                                  make_lennard_jones(0.04));
    CHECK(res.resolved == DriftSign::minus);
    CHECK(res.minus_report.pass);
    CHECK_FALSE(res.plus_report.pass);
  }
  SUBCASE("without interaction the sign carries no weight") {
    bool threw = false;
    try {
      resolve_sign_conventions(free_gas_ensemble(), make_zero_potential());
    } catch (const SignResolutionError& e) {
      threw = true;
      CHECK(e.reason == SignResolutionError::Reason::both_pass);
    }
    CHECK(threw);
  }
  SUBCASE("a field orthogonal to the one-body force cannot see the sign") {
    // Planar tangential field: (grad phi(x), v(x)) = 0 at every point inside
    // the field's support, so both conventions produce the same residuals.
    EnergyModel model{make_lennard_jones(0.04),
                      make_box(2, 8.0, BoundaryMode::periodic), {}};
    SamplerParams sp;
    sp.z = 0.2;
    sp.seed = 808;
    Ensemble ens = sample_ensemble(model, sp, 8000);
    IdentityProbes probes = standard_probes(model.box);
    VectorField v = VectorField::tangential(make_bump(Vec::zero(2), 2.8, 1.0));
    bool threw = false;
    try {
      resolve_sign_conventions(probes.F_a, probes.G_a, v, ens, model.pot);
    } catch (const SignResolutionError& e) {
      threw = true;
      CHECK(e.reason == SignResolutionError::Reason::both_pass);
    }
    CHECK(threw);
  }
}
