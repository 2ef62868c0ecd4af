// Differential calculus on configuration space: smooth compactly-supported
// test functions, cylinder functionals F(gamma) = g(<f_1,gamma>,...,<f_N,gamma>),
// their configuration-space gradients, and the Markov generators of the
// interacting dynamics in the fixed frame, the moving frame, and the coupled
// tagged-pair frame.
//
// Several displayed formulas carry a sign convention on the one-body drift
// term that the literature states inconsistently; every operation that
// depends on it takes an explicit DriftSign argument, and the verification
// module resolves the correct sign empirically against sampled ensembles.
#pragma once

#include <memory>
#include <vector>

#include "gibbsdyn/geometry.hpp"
#include "gibbsdyn/gibbs.hpp"
#include "gibbsdyn/potentials.hpp"
#include "gibbsdyn/rng.hpp"

namespace gibbsdyn {

enum class DriftSign { plus, minus };

inline double sign_value(DriftSign s) { return s == DriftSign::plus ? 1.0 : -1.0; }
inline const char* to_string(DriftSign s) { return s == DriftSign::plus ? "plus" : "minus"; }

// ---------------------------------------------------------------------------
// TestFunction: f(x) = (p0 + p.u) * m(|u|^2),  u = (x - center)/radius,
// with the mollifier profile m(s) = exp(1 - 1/(1-s)) for s < 1 and 0 beyond.
// Smooth everywhere, supported in the closed ball of the given radius.
// ---------------------------------------------------------------------------
class TestFunction {
 public:
  TestFunction(Vec center, double radius, double p0, Vec tilt);

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  double laplacian(const Vec& x) const;

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  int dim() const { return center_.dim; }

 private:
  Vec center_;
  double radius_;
  double p0_;
  Vec tilt_;
};

inline TestFunction make_bump(Vec center, double radius, double amplitude) {
  return TestFunction(center, radius, amplitude, Vec::zero(center.dim));
}
inline TestFunction make_tilted_bump(Vec center, double radius, double p0, Vec tilt) {
  return TestFunction(center, radius, p0, tilt);
}

// ---------------------------------------------------------------------------
// Outer functions g: R^N -> R with exact first and second partials.
// ---------------------------------------------------------------------------
class OuterFunction {
 public:
  virtual ~OuterFunction() = default;
  virtual int arity() const = 0;
  virtual double value(const std::vector<double>& u) const = 0;
  virtual double partial(int i, const std::vector<double>& u) const = 0;
  virtual double partial2(int i, int j, const std::vector<double>& u) const = 0;
};

using OuterPtr = std::shared_ptr<const OuterFunction>;

OuterPtr outer_constant(double c, int arity);
// g(u) = c0 + sum_i coeff_i u_i
OuterPtr outer_linear(double c0, std::vector<double> coeff);
// g(u) = c0 + (p_const + p.u) * tanh(q_const + q.u)
OuterPtr outer_poly_sigmoid(double c0, double p_const, std::vector<double> p,
                            double q_const, std::vector<double> q);
// g(u) = a * exp(-|u - mean|^2 / (2 width^2))
OuterPtr outer_gaussian(double a, std::vector<double> mean, double width);
// (g1 x g2)(u) = g1(u[0..n1)) * g2(u[n1..n1+n2)): outer function of the
// concatenated lift vector; product rule gives exact partials.
OuterPtr outer_product(OuterPtr g1, OuterPtr g2);

// ---------------------------------------------------------------------------
// Cylinder functionals
// ---------------------------------------------------------------------------
struct CylinderFunction {
  OuterPtr outer;
  std::vector<TestFunction> inner;

  // <f_i, gamma> = sum over points of f_i.
  std::vector<double> lifts(const Configuration& gamma) const;
  double value(const Configuration& gamma) const;
};

// F * G as a cylinder functional over the concatenated inner families.
CylinderFunction cylinder_product(const CylinderFunction& f, const CylinderFunction& g);

// Gradient of F in the coordinate of the k-th point:
//   sum_i d_i g(lifts) grad f_i(x_k).
Vec config_gradient(const CylinderFunction& f, const Configuration& gamma, int k);

// Sum of config_gradient over all points: the derivative of F along a
// simultaneous translation of the whole configuration.
Vec translation_gradient(const CylinderFunction& f, const Configuration& gamma);

// sum over points of (config_gradient at x, v(x)).
class VectorField;
double directional_derivative(const CylinderFunction& f, const VectorField& v,
                              const Configuration& gamma);

// ---------------------------------------------------------------------------
// Vector fields on the box (compact support via a TestFunction profile).
// ---------------------------------------------------------------------------
class VectorField {
 public:
  enum class Kind { directional, radial, tangential };

  static VectorField directional(TestFunction profile, Vec direction);
  static VectorField radial(TestFunction profile);
  // Planar field profile(x) * (-x_2, x_1): orthogonal at every point to the
  // ray from the origin, hence to any radial one-body force.  Requires d = 2
  // and a profile centred at the origin.
  static VectorField tangential(TestFunction profile);

  Vec value(const Vec& x) const;
  double divergence(const Vec& x) const;
  int dim() const { return profile_.dim(); }

 private:
  VectorField(Kind k, TestFunction p, Vec d)
      : kind_(k), profile_(std::move(p)), dir_(d) {}
  Kind kind_;
  TestFunction profile_;
  Vec dir_;
};

// ---------------------------------------------------------------------------
// One-body field sum  sum_{y in gamma} grad phi(y)  (box displacement from
// the origin), shared by the moving-frame generator and drift.
// ---------------------------------------------------------------------------
Vec potential_field_sum(const PairPotential& pot, const Configuration& gamma);

// ---------------------------------------------------------------------------
// First-order integration-by-parts scalar:
//   B_v(gamma) = <div v, gamma> + s * sum_x (grad phi(x), v(x))
//                - sum_{pairs {x,y}} (grad phi(x-y), v(x) - v(y)).
// ---------------------------------------------------------------------------
double divergence_term(const PairPotential& pot, const VectorField& v,
                       const Configuration& gamma, DriftSign s);

// ---------------------------------------------------------------------------
// Markov generators on cylinder functionals.
//
// generator_fixed_frame: the interacting system with every particle feeling
// the pair field of the others plus the one-body field of the origin particle
// held fixed (second-order term sum_ij d2g <(grad f_i, grad f_j), gamma>).
//
// generator_moving_frame: the same system watched from the origin particle,
// which itself diffuses; the relative coordinates gain a common extra noise
// and the negative of the tagged drift.  Its extra part is
//   sum_ij d2g (<grad f_i,gamma>, <grad f_j,gamma>)
//   + sum_j d_j g (<lap f_j, gamma> - (sum_y grad phi(y), <grad f_j, gamma>)),
// whose one-body sign is fixed by the frame change (not by s).
//
// generator_coupled: the pair (tagged position xi, environment gamma) with
// product functionals  f(xi) F(gamma).
// ---------------------------------------------------------------------------
double generator_fixed_frame(const PairPotential& pot, const CylinderFunction& f,
                             const Configuration& gamma, DriftSign s);

double generator_moving_frame(const PairPotential& pot, const CylinderFunction& f,
                              const Configuration& gamma, DriftSign s);

struct TaggedCylinderFunction {
  TestFunction tagged;      // f(xi)
  CylinderFunction env;     // F(gamma)
  double value(const Vec& xi, const Configuration& gamma) const {
    return tagged.value(xi) * env.value(gamma);
  }
};

double generator_coupled(const PairPotential& pot, const TaggedCylinderFunction& f,
                         const Vec& xi, const Configuration& gamma, DriftSign s);

// ---------------------------------------------------------------------------
// Finite-difference validation.  Every report is the maximum of
// |analytic - fd| / max(1, |analytic|, |fd|) over the probes.
// ---------------------------------------------------------------------------
struct FDReport {
  double max_rel_err = 0;
  int probes = 0;
};

FDReport fd_validate_test_function(const TestFunction& f, int probes,
                                   std::uint64_t seed, double h_grad = 1e-5,
                                   double h_lap = 1e-4);
FDReport fd_validate_outer(const OuterFunction& g, int probes, std::uint64_t seed,
                           double h = 1e-6);
FDReport fd_validate_vector_field(const VectorField& v, int probes,
                                  std::uint64_t seed, double h = 1e-5);
// Point-wise coordinate perturbations against config_gradient, a uniform
// shift against translation_gradient, and a flow along v against
// directional_derivative.
FDReport fd_validate_cylinder(const CylinderFunction& f, const VectorField& v,
                              const Configuration& gamma, double h = 1e-6);

}  // namespace gibbsdyn
