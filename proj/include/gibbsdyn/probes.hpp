// A deterministic battery of probe functionals and fields, scaled to a box,
// shared by the verification suite, the command-line runner, and the tests.
// Two independent probe sets (a and b) give the identity suite distinct
// witnesses; the tagged pair covers the coupled-process identities.
#pragma once

#include <cstdint>
#include <vector>

#include "gibbsdyn/calculus.hpp"
#include "gibbsdyn/stats.hpp"
#include "gibbsdyn/verify.hpp"

namespace gibbsdyn {

struct IdentityProbes {
  CylinderFunction F_a, G_a;
  CylinderFunction F_b, G_b;
  VectorField v_a, v_b;
  TaggedCylinderFunction tF, tG;
};

// All supports sit strictly inside the box (reach <= 0.8 * half side).
IdentityProbes standard_probes(const Box& box);

// The ten-identity verification suite over one ensemble: first-order
// integration by parts (both probe sets), translation integration by parts
// (both probe sets), the three Dirichlet-form/generator dualities, and the
// three generator symmetries.  `seed` feeds the tagged-coordinate draws of
// the coupled tests.
std::vector<MCTestReport> identity_suite(const Ensemble& ensemble,
                                         const PairPotential& pot, DriftSign s,
                                         std::uint64_t seed);

}  // namespace gibbsdyn
