#include "gibbsdyn/probes.hpp"

namespace gibbsdyn {

namespace {

Vec axis_vec(int dim, double a) {
  Vec v = Vec::zero(dim);
  v[0] = a;
  return v;
}

}  // namespace

IdentityProbes standard_probes(const Box& box) {
  const int d = box.dim;
  const double h = box.half();

  // Inner test functions.  Reach (|center| + radius) stays below 0.8 h so
  // every probe vanishes near the walls of a free box and on the seam of a
  // periodic one.
  TestFunction f1 = make_tilted_bump(axis_vec(d, 0.12 * h), 0.62 * h, 1.0,
                                     axis_vec(d, 0.35));
  TestFunction f2 = make_bump(axis_vec(d, -0.18 * h), 0.55 * h, 0.9);
  TestFunction f3 = make_tilted_bump(axis_vec(d, -0.05 * h), 0.70 * h, 0.7,
                                     axis_vec(d, -0.25));
  TestFunction f4 = make_bump(axis_vec(d, 0.22 * h), 0.50 * h, 1.2);

  IdentityProbes p{
      // F_a, G_a
      CylinderFunction{outer_poly_sigmoid(0.4, 0.6, {0.5, -0.3}, 0.15, {0.30, 0.20}),
                       {f1, f2}},
      CylinderFunction{outer_gaussian(1.1, {0.5, -0.2}, 1.4), {f4, f3}},
      // F_b, G_b
      CylinderFunction{outer_poly_sigmoid(-0.2, 0.8, {-0.35, 0.25}, -0.1, {0.22, -0.18}),
                       {f3, f4}},
      CylinderFunction{outer_gaussian(0.9, {-0.3, 0.4}, 1.1), {f2, f1}},
      // v_a, v_b
      VectorField::radial(make_bump(Vec::zero(d), 0.55 * h, 1.0)),
      VectorField::directional(make_bump(axis_vec(d, 0.15 * h), 0.5 * h, 1.0),
                               axis_vec(d, 1.0)),
      // tagged pair
      TaggedCylinderFunction{make_bump(axis_vec(d, 0.10 * h), 0.55 * h, 1.0),
                             CylinderFunction{
                                 outer_poly_sigmoid(0.3, 0.5, {0.4, -0.2}, 0.1,
                                                    {0.25, 0.15}),
                                 {f1, f3}}},
      TaggedCylinderFunction{make_tilted_bump(axis_vec(d, -0.12 * h), 0.5 * h, 0.8,
                                              axis_vec(d, 0.2)),
                             CylinderFunction{outer_gaussian(1.0, {0.3, -0.3}, 1.3),
                                              {f4, f2}}},
  };
  return p;
}

std::vector<MCTestReport> identity_suite(const Ensemble& ensemble,
                                         const PairPotential& pot, DriftSign s,
                                         std::uint64_t seed) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("identity_suite: empty ensemble");
  IdentityProbes p = standard_probes(ensemble.samples.front().box);

  std::vector<MCTestReport> out;
  out.push_back(test_ibp(p.F_a, p.G_a, p.v_a, ensemble, pot, s));
  out.back().id = "ibp_a";
  out.push_back(test_ibp(p.F_b, p.G_b, p.v_b, ensemble, pot, s));
  out.back().id = "ibp_b";
  out.push_back(test_ibp_translation(p.F_a, p.G_a, ensemble, pot));
  out.back().id = "ibp_translation_a";
  out.push_back(test_ibp_translation(p.F_b, p.G_b, ensemble, pot));
  out.back().id = "ibp_translation_b";
  out.push_back(test_dirichlet(DirichletForm::gsdad, p.F_a, p.G_a, ensemble, pot, s));
  out.push_back(test_dirichlet(DirichletForm::env, p.F_b, p.G_b, ensemble, pot, s));
  out.push_back(test_dirichlet(p.tF, p.tG, ensemble, pot, s, seed));
  out.push_back(test_symmetry(DirichletForm::gsdad, p.F_b, p.G_b, ensemble, pot, s));
  out.push_back(test_symmetry(DirichletForm::env, p.F_a, p.G_a, ensemble, pot, s));
  out.push_back(test_symmetry(p.tF, p.tG, ensemble, pot, s, substream_seed(seed, 2)));
  return out;
}

}  // namespace gibbsdyn
