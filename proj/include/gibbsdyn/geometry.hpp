// Boxes, point configurations, and a cell-list spatial index.
//
// All positions live in a centred cube [-side/2, side/2]^dim with either free
// or periodic boundary.  Displacements and distances always go through Box so
// that the minimum-image convention is applied exactly once, in one place.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "gibbsdyn/errors.hpp"

namespace gibbsdyn {

inline constexpr int kMaxDim = 3;

// Two configuration points closer than kDistinctScale * side are considered
// coincident and rejected: configurations are simple point sets.
inline constexpr double kDistinctScale = 1e-9;

// ---------------------------------------------------------------------------
// Vec: a point or displacement in dimension 1..3.
// ---------------------------------------------------------------------------
struct Vec {
  int dim = 0;
  std::array<double, kMaxDim> c{};

  Vec() = default;
  explicit Vec(int d) : dim(d) { c.fill(0.0); }
  Vec(int d, std::array<double, kMaxDim> v) : dim(d), c(v) {}

  static Vec zero(int d) { return Vec(d); }
  static Vec of(double x) { return Vec{1, {x, 0, 0}}; }
  static Vec of(double x, double y) { return Vec{2, {x, y, 0}}; }
  static Vec of(double x, double y, double z) { return Vec{3, {x, y, z}}; }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int k = 0; k < dim; ++k) c[k] += o.c[k];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int k = 0; k < dim; ++k) c[k] -= o.c[k];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int k = 0; k < dim; ++k) c[k] *= a;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double a, Vec v) { return v *= a; }
  friend Vec operator*(Vec v, double a) { return v *= a; }
  friend Vec operator-(Vec v) { return v *= -1.0; }

  double norm2() const {
    double s = 0;
    for (int k = 0; k < dim; ++k) s += c[k] * c[k];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  bool finite() const {
    for (int k = 0; k < dim; ++k)
      if (!std::isfinite(c[k])) return false;
    return true;
  }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int k = 0; k < a.dim; ++k) s += a.c[k] * b.c[k];
  return s;
}

// ---------------------------------------------------------------------------
// Box
// ---------------------------------------------------------------------------
enum class BoundaryMode { free, periodic };

struct Box {
  int dim = 1;
  double side = 1.0;
  BoundaryMode mode = BoundaryMode::free;

  double volume() const {
    double v = 1;
    for (int k = 0; k < dim; ++k) v *= side;
    return v;
  }
  double half() const { return 0.5 * side; }
  double r_distinct() const { return kDistinctScale * side; }

  bool contains(const Vec& x) const {
    for (int k = 0; k < dim; ++k)
      if (x[k] < -half() || x[k] > half()) return false;
    return true;
  }

  // Map a point into [-side/2, side/2) coordinate-wise (periodic only; a
  // no-op in free mode).
  Vec wrap(Vec x) const {
    if (mode == BoundaryMode::free) return x;
    for (int k = 0; k < dim; ++k) {
      double u = (x[k] + half()) / side;
      u -= std::floor(u);
      x[k] = u * side - half();
    }
    return x;
  }

  // Displacement b - a under the box metric (minimum image when periodic).
  Vec delta(const Vec& a, const Vec& b) const {
    Vec d(dim);
    for (int k = 0; k < dim; ++k) {
      double v = b[k] - a[k];
      if (mode == BoundaryMode::periodic) {
        v -= side * std::round(v / side);
      }
      d[k] = v;
    }
    return d;
  }

  double distance(const Vec& a, const Vec& b) const { return delta(a, b).norm(); }

  // Displacement of x from the origin under the box metric.  One-body terms
  // evaluate potentials at this canonical displacement.
  Vec from_origin(const Vec& x) const { return delta(Vec::zero(dim), x); }
};

inline Box make_box(int dimension, double side_length, BoundaryMode mode) {
  if (dimension < 1 || dimension > kMaxDim)
    throw std::invalid_argument("make_box: dimension must be 1, 2, or 3");
  if (!(side_length > 0) || !std::isfinite(side_length))
    throw std::invalid_argument("make_box: side_length must be positive and finite");
  return Box{dimension, side_length, mode};
}

// ---------------------------------------------------------------------------
// Configuration: an ordered, simple (pairwise-distinct) point set in a box.
// ---------------------------------------------------------------------------
struct Configuration {
  Box box;
  std::vector<Vec> points;

  std::size_t size() const { return points.size(); }
};

// Smallest pairwise distance under the box metric; +inf for n < 2.
double min_pair_distance(const Box& box, const std::vector<Vec>& pts);

// Throws std::invalid_argument if any point is non-finite, outside a free
// box, or if two points come within box.r_distinct() of each other.
// Periodic-box points are wrapped into the fundamental domain.
Configuration make_configuration(const Box& box, std::vector<Vec> pts);

// Assemble without validation.  For internal hot paths whose invariants are
// maintained by construction; validated entry points should use
// make_configuration.
inline Configuration unchecked_configuration(const Box& box, std::vector<Vec> pts) {
  return Configuration{box, std::move(pts)};
}

// ---------------------------------------------------------------------------
// Content hashing (FNV-1a) used for cell-list staleness detection.
// ---------------------------------------------------------------------------
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_double(double x, std::uint64_t h) {
  x += 0.0;  // canonicalise -0.0 to +0.0 so equal values hash equally
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  return fnv1a64(&bits, sizeof bits, h);
}

std::uint64_t hash_configuration(const Configuration& cfg);

// ---------------------------------------------------------------------------
// CellList: uniform-grid spatial index over a configuration snapshot.
//
// The grid has floor(side/cutoff) cells per axis (at least 1), so each cell is
// at least `cutoff` wide and any ball of radius r <= cutoff is covered by a
// cell and its immediate neighbours.  Queries larger than the cutoff go
// through gather_within, which widens the scan shell-by-shell, so internal
// callers may ask for arbitrarily large radii while the public neighbor query
// enforces the documented r <= cutoff contract.
// ---------------------------------------------------------------------------
struct CellList {
  Box box;
  double cutoff = 0;
  int cells_per_axis = 1;
  double cell_side = 0;
  std::vector<std::vector<int>> buckets;  // cells_per_axis^dim buckets
  std::uint64_t source_hash = 0;

  int bucket_index(const Vec& x) const;
};

// cutoff must satisfy 0 < cutoff <= box.side.
CellList build_cell_list(const Configuration& cfg, double cutoff);

// Indices (ascending) of points of cfg with box-distance <= r from center,
// excluding index `exclude` (-1: none).  r == 0 returns an empty result.
// Accepts any r >= 0; used internally for full-range energy scans.
// Throws StaleStructureError if cfg is not the configuration the cell list
// was built from (content hash mismatch).
std::vector<int> gather_within(const CellList& cl, const Configuration& cfg,
                               const Vec& center, double r, int exclude = -1);

// Public neighbor query: additionally enforces r <= cutoff
// (std::invalid_argument otherwise).
std::vector<int> neighbors(const CellList& cl, const Configuration& cfg,
                           const Vec& center, double r, int exclude = -1);

}  // namespace gibbsdyn
