#include "gibbsdyn/geometry.hpp"

#include <algorithm>
#include <limits>

namespace gibbsdyn {

double min_pair_distance(const Box& box, const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, box.distance(pts[i], pts[j]));
  return best;
}

Configuration make_configuration(const Box& box, std::vector<Vec> pts) {
  for (auto& p : pts) {
    if (p.dim != box.dim)
      throw std::invalid_argument("make_configuration: point dimension mismatch");
    if (!p.finite())
      throw std::invalid_argument("make_configuration: non-finite coordinate");
    if (box.mode == BoundaryMode::periodic) {
      p = box.wrap(p);
    } else if (!box.contains(p)) {
      throw std::invalid_argument("make_configuration: point outside box");
    }
  }
  if (min_pair_distance(box, pts) < box.r_distinct())
    throw std::invalid_argument(
        "make_configuration: points closer than the distinctness radius");
  return Configuration{box, std::move(pts)};
}

std::uint64_t hash_configuration(const Configuration& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::int64_t meta[2] = {cfg.box.dim,
                          cfg.box.mode == BoundaryMode::periodic ? 1 : 0};
  h = fnv1a64(meta, sizeof meta, h);
  h = hash_double(cfg.box.side, h);
  std::uint64_t n = cfg.points.size();
  h = fnv1a64(&n, sizeof n, h);
  for (const auto& p : cfg.points)
    for (int k = 0; k < p.dim; ++k) h = hash_double(p[k], h);
  return h;
}

int CellList::bucket_index(const Vec& x) const {
  int idx = 0;
  for (int k = 0; k < box.dim; ++k) {
    double u = (x[k] + box.half()) / cell_side;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, cells_per_axis - 1);
    idx = idx * cells_per_axis + i;
  }
  return idx;
}

CellList build_cell_list(const Configuration& cfg, double cutoff) {
  if (!(cutoff > 0) || !std::isfinite(cutoff))
    throw std::invalid_argument("build_cell_list: cutoff must be positive");
  if (cutoff > cfg.box.side)
    throw std::invalid_argument("build_cell_list: cutoff exceeds box side");
  CellList cl;
  cl.box = cfg.box;
  cl.cutoff = cutoff;
  cl.cells_per_axis = std::max(1, static_cast<int>(std::floor(cfg.box.side / cutoff)));
  cl.cell_side = cfg.box.side / cl.cells_per_axis;
  std::size_t total = 1;
  for (int k = 0; k < cfg.box.dim; ++k) total *= static_cast<std::size_t>(cl.cells_per_axis);
  cl.buckets.assign(total, {});
  for (std::size_t i = 0; i < cfg.points.size(); ++i)
    cl.buckets[static_cast<std::size_t>(cl.bucket_index(cfg.points[i]))].push_back(
        static_cast<int>(i));
  cl.source_hash = hash_configuration(cfg);
  return cl;
}

namespace {

// Axis cell indices to visit for a query centred at cell `c` reaching
// `reach` cells either side.  Periodic boxes wrap; free boxes clamp.  When
// the reach spans the whole axis every cell is listed exactly once.
std::vector<int> axis_cells(const CellList& cl, int c, int reach) {
  const int m = cl.cells_per_axis;
  std::vector<int> out;
  if (2 * reach + 1 >= m) {
    out.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  for (int o = -reach; o <= reach; ++o) {
    int i = c + o;
    if (cl.box.mode == BoundaryMode::periodic) {
      i = ((i % m) + m) % m;
    } else if (i < 0 || i >= m) {
      continue;
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace

std::vector<int> gather_within(const CellList& cl, const Configuration& cfg,
                               const Vec& center, double r, int exclude) {
  if (hash_configuration(cfg) != cl.source_hash)
    throw StaleStructureError(
        "cell list does not match the supplied configuration; rebuild it");
  if (!(r >= 0) || !std::isfinite(r))
    throw std::invalid_argument("gather_within: radius must be finite and >= 0");
  std::vector<int> out;
  if (r == 0 || cfg.points.empty()) return out;

  const int dim = cl.box.dim;
  const int reach = static_cast<int>(std::ceil(r / cl.cell_side));
  std::array<int, kMaxDim> ccell{};
  {
    Vec q = cl.box.wrap(center);
    int idx = cl.bucket_index(q);
    for (int k = dim - 1; k >= 0; --k) {
      ccell[k] = idx % cl.cells_per_axis;
      idx /= cl.cells_per_axis;
    }
  }
  std::array<std::vector<int>, kMaxDim> axes;
  for (int k = 0; k < dim; ++k) axes[k] = axis_cells(cl, ccell[k], reach);

  std::array<std::size_t, kMaxDim> pick{};
  while (true) {
    int bucket = 0;
    for (int k = 0; k < dim; ++k) bucket = bucket * cl.cells_per_axis + axes[k][pick[k]];
    for (int i : cl.buckets[static_cast<std::size_t>(bucket)]) {
      if (i == exclude) continue;
      if (cl.box.distance(center, cfg.points[static_cast<std::size_t>(i)]) <= r)
        out.push_back(i);
    }
    // advance the mixed-radix counter over the axis lists
    int k = dim - 1;
    while (k >= 0) {
      if (++pick[k] < axes[k].size()) break;
      pick[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> neighbors(const CellList& cl, const Configuration& cfg,
                           const Vec& center, double r, int exclude) {
  if (r > cl.cutoff)
    throw std::invalid_argument("neighbors: query radius exceeds the build cutoff");
  return gather_within(cl, cfg, center, r, exclude);
}

}  // namespace gibbsdyn
