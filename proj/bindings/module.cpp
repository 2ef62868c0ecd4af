// Python bindings: a thin convenience layer over the C++ core.  Points cross
// the boundary as plain lists of floats so no numpy dependency is required;
// everything returned is a dict or list of built-in types.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbsdyn/dynamics.hpp"
#include "gibbsdyn/harmonic.hpp"
#include "gibbsdyn/probes.hpp"
#include "gibbsdyn/verify.hpp"

namespace py = pybind11;
using namespace gibbsdyn;

namespace {

BoundaryMode parse_boundary(const std::string& s) {
  if (s == "free") return BoundaryMode::free;
  if (s == "periodic") return BoundaryMode::periodic;
  throw std::invalid_argument("boundary must be 'free' or 'periodic', got '" + s + "'");
}

Vec to_vec(const std::vector<double>& x) {
  if (x.empty() || x.size() > 3)
    throw std::invalid_argument("a point needs 1 to 3 coordinates");
  Vec v(static_cast<int>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) v[static_cast<int>(k)] = x[k];
  return v;
}

std::vector<double> from_vec(const Vec& v) {
  std::vector<double> out(static_cast<std::size_t>(v.dim));
  for (int k = 0; k < v.dim; ++k) out[static_cast<std::size_t>(k)] = v[k];
  return out;
}

Configuration to_config(const Box& box, const std::vector<std::vector<double>>& pts) {
  std::vector<Vec> vs;
  vs.reserve(pts.size());
  for (const auto& p : pts) vs.push_back(to_vec(p));
  return make_configuration(box, vs);
}

py::list from_points(const std::vector<Vec>& pts) {
  py::list out;
  for (const auto& p : pts) out.append(from_vec(p));
  return out;
}

py::dict report_dict(const MCTestReport& rep) {
  py::dict d;
  d["id"] = rep.id;
  d["estimate"] = rep.estimate;
  d["se"] = rep.se;
  d["z"] = rep.z;
  d["n"] = rep.n;
  d["pass"] = rep.pass;
  d["inconclusive"] = rep.inconclusive;
  py::dict meta;
  for (const auto& [k, v] : rep.meta) meta[py::str(k)] = v;
  d["meta"] = meta;
  return d;
}

PairPotential potential_for(double c) {
  return c == 0.0 ? make_zero_potential() : make_lennard_jones(c);
}

}  // namespace

PYBIND11_MODULE(gibbsdyn, m) {
  m.doc() = "Interacting Brownian particles under a Gibbs measure: sampling, "
            "dynamics in fixed and tagged frames, and the verification suite.";
  m.attr("__version__") = "0.1.0";

  m.def(
      "potential_value",
      [](double r, double c) { return potential_for(c).value_radial(r); },
      py::arg("r"), py::arg("c") = 0.04,
      "Pair potential c*(r^-12 - r^-6) evaluated at separation r.");

  m.def(
      "potential_gradient",
      [](double r, double c) { return potential_for(c).deriv_radial(r); },
      py::arg("r"), py::arg("c") = 0.04,
      "Radial derivative of the pair potential at separation r.");

  m.def(
      "sample",
      [](int dim, double side, const std::string& boundary, double z, double c,
         std::size_t count, std::uint64_t seed, std::uint64_t burn_in,
         std::uint64_t thinning) {
        EnergyModel model{potential_for(c), make_box(dim, side, parse_boundary(boundary)), {}};
        SamplerParams p;
        p.z = z;
        p.seed = seed;
        p.burn_in = burn_in;
        p.thinning = thinning;
        Ensemble ens = sample_ensemble(model, p, count);
        py::list samples;
        for (const auto& s : ens.samples) samples.append(from_points(s.points));
        py::dict d;
        d["samples"] = samples;
        d["ess"] = ens.diag.ess;
        d["thinning"] = ens.diag.thinning;
        d["tau_count"] = ens.diag.tau_count;
        d["accept_insert"] = ens.diag.accept_insert;
        d["accept_remove"] = ens.diag.accept_remove;
        d["accept_displace"] = ens.diag.accept_displace;
        return d;
      },
      py::arg("dim") = 1, py::arg("side") = 10.0, py::arg("boundary") = "periodic",
      py::arg("z") = 0.5, py::arg("c") = 0.04, py::arg("count") = 1000,
      py::arg("seed") = 1, py::arg("burn_in") = 20000, py::arg("thinning") = 0,
      "Draw configurations from the grand-canonical Gibbs measure.  c = 0 "
      "selects the free gas.  Returns samples plus chain diagnostics.");

  m.def(
      "simulate",
      [](const std::string& system, const std::vector<std::vector<double>>& points,
         int dim, double side, const std::string& boundary,
         std::optional<std::vector<double>> xi, double c, double dt,
         std::uint64_t steps, std::uint64_t stride, std::uint64_t seed,
         const std::string& wall) {
        System sys = parse_system(system);
        Box box = make_box(dim, side, parse_boundary(boundary));
        std::optional<Vec> tagged;
        if (xi) tagged = to_vec(*xi);
        SDEState st = make_sde_state(sys, to_config(box, points), seed, tagged);
        IntegratorParams ip;
        ip.dt = dt;
        ip.seed = seed;
        if (wall == "reflect") ip.wall = IntegratorParams::Wall::reflect;
        else if (wall == "wrap") ip.wall = IntegratorParams::Wall::wrap;
        else throw std::invalid_argument("wall must be 'reflect' or 'wrap'");
        Trajectory traj = run_trajectory(sys, potential_for(c), st, ip, steps, stride);
        py::list t, frames, xis;
        for (const auto& f : traj.frames) {
          t.append(f.t);
          frames.append(from_points(f.points));
          if (f.xi) xis.append(from_vec(*f.xi));
        }
        py::dict d;
        d["system"] = std::string(to_string(traj.system));
        d["t"] = t;
        d["frames"] = frames;
        d["xi"] = (sys == System::coup) ? py::object(xis) : py::object(py::none());
        d["rejections"] = traj.rejections;
        d["rejection_warning"] = traj.rejection_warning;
        return d;
      },
      py::arg("system"), py::arg("points"), py::arg("dim") = 1,
      py::arg("side") = 10.0, py::arg("boundary") = "free",
      py::arg("xi") = std::nullopt, py::arg("c") = 0.04, py::arg("dt") = 1e-4,
      py::arg("steps") = 1000, py::arg("stride") = 10, py::arg("seed") = 1,
      py::arg("wall") = "reflect",
      "Integrate one of the systems gsd / gsdad / env / coup from the given "
      "points (coup also needs xi).  Returns recorded frames.");

  m.def(
      "verify",
      [](int dim, double side, const std::string& boundary, double z, double c,
         std::size_t samples, std::uint64_t seed, const std::string& sign) {
        EnergyModel model{potential_for(c), make_box(dim, side, parse_boundary(boundary)), {}};
        SamplerParams p;
        p.z = z;
        p.seed = seed;
        Ensemble ens = sample_ensemble(model, p, samples);
        DriftSign s;
        if (sign == "minus") s = DriftSign::minus;
        else if (sign == "plus") s = DriftSign::plus;
        else throw std::invalid_argument("sign must be 'minus' or 'plus'");
        py::list out;
        for (const auto& rep : identity_suite(ens, model.pot, s, seed))
          out.append(report_dict(rep));
        return out;
      },
      py::arg("dim") = 1, py::arg("side") = 10.0, py::arg("boundary") = "periodic",
      py::arg("z") = 0.5, py::arg("c") = 0.04, py::arg("samples") = 20000,
      py::arg("seed") = 1, py::arg("sign") = "minus",
      "Run the ten-identity verification battery on a freshly sampled "
      "ensemble; returns one report dict per identity.");

  m.def(
      "k_transform",
      [](const py::function& fn, int n_max, const std::vector<std::vector<double>>& points,
         int dim, double side) {
        FiniteConfigFunction g;
        g.n_max = n_max;
        g.fn = [fn](const std::vector<Vec>& pts) {
          py::list arg;
          for (const auto& p : pts) arg.append(from_vec(p));
          return fn(arg).cast<double>();
        };
        Box box = make_box(dim, side, BoundaryMode::free);
        return k_transform(g, to_config(box, points));
      },
      py::arg("fn"), py::arg("n_max"), py::arg("points"), py::arg("dim") = 1,
      py::arg("side") = 10.0,
      "Subset-sum transform (KG)(gamma) of a finitely supported function "
      "given as a python callable on point lists.");
}
