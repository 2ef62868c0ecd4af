#include "gibbsdyn/trajectory.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gibbsdyn {

namespace {

constexpr char kTrajMagic[8] = {'G', 'D', 'T', 'R', 'A', 'J', '0', '0'};
constexpr char kEnsMagic[8] = {'G', 'D', 'E', 'N', 'S', '0', '0', '0'};
constexpr std::uint32_t kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Little-endian byte packing (host-endianness independent).
// ---------------------------------------------------------------------------
struct Writer {
  std::string bytes;

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void raw(const char* data, std::size_t n) { bytes.append(data, n); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes.append(s);
  }
};

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;
  std::size_t limit;

  explicit Reader(const std::string& b, std::size_t lim) : bytes(b), limit(lim) {}

  void need(std::size_t n) const {
    if (pos + n > limit) throw TrajectoryFormatError("file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

std::uint64_t checksum_of(const std::string& bytes, std::size_t n) {
  return fnv1a64(bytes.data(), n);
}

void append_footer(Writer& w, std::uint64_t count) {
  w.u64(count);
  w.u64(checksum_of(w.bytes, w.bytes.size()));
}

// Validates magic/version/checksum and returns a reader over the payload
// (everything after the magic+version, before the 16-byte footer) plus the
// footer count.
std::pair<Reader, std::uint64_t> open_payload(const std::string& bytes,
                                              const char magic[8],
                                              const char* what) {
  if (bytes.size() < 8 + 4 + 16) throw TrajectoryFormatError(std::string(what) + ": file truncated");
  if (std::memcmp(bytes.data(), magic, 8) != 0)
    throw TrajectoryFormatError(std::string(what) + ": bad magic (not this file type)");
  const std::size_t body_end = bytes.size() - 16;
  Reader footer(bytes, bytes.size());
  footer.pos = body_end;
  const std::uint64_t count = footer.u64();
  const std::uint64_t stored = footer.u64();
  const std::uint64_t actual = checksum_of(bytes, body_end + 8);
  if (stored != actual)
    throw TrajectoryFormatError(std::string(what) + ": checksum mismatch (corrupted file)");
  Reader r(bytes, body_end);
  r.pos = 8;
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw TrajectoryFormatError(std::string(what) + ": format version " +
                                std::to_string(version) + " unsupported (expected " +
                                std::to_string(kFormatVersion) + ")");
  return {r, count};
}

std::uint32_t boundary_code(BoundaryMode m) {
  return m == BoundaryMode::periodic ? 1u : 0u;
}
BoundaryMode boundary_from(std::uint32_t code, const char* what) {
  if (code == 0) return BoundaryMode::free;
  if (code == 1) return BoundaryMode::periodic;
  throw TrajectoryFormatError(std::string(what) + ": bad boundary mode code");
}

}  // namespace

// ---------------------------------------------------------------------------
// Trajectory files
// ---------------------------------------------------------------------------
std::string trajectory_bytes(const Trajectory& traj) {
  Writer w;
  w.raw(kTrajMagic, 8);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(traj.box.dim));
  w.f64(traj.box.side);
  w.u32(boundary_code(traj.box.mode));
  w.u32(static_cast<std::uint32_t>(traj.system));
  w.f64(traj.dt);
  w.u64(traj.stride);
  w.u64(traj.seed);
  w.str(traj.potential);
  const bool has_xi = traj.system == System::coup;
  w.u32(has_xi ? 1u : 0u);
  w.u64(traj.total_steps);
  w.u64(traj.rejections);
  w.u32(traj.rejection_warning ? 1u : 0u);
  for (const auto& f : traj.frames) {
    w.f64(f.t);
    w.u64(f.points.size());
    if (has_xi) {
      if (!f.xi) throw std::invalid_argument("trajectory_bytes: coupled frame lacks xi");
      for (int k = 0; k < traj.box.dim; ++k) w.f64((*f.xi)[k]);
    }
    for (const auto& p : f.points)
      for (int k = 0; k < traj.box.dim; ++k) w.f64(p[k]);
  }
  append_footer(w, traj.frames.size());
  return std::move(w.bytes);
}

Trajectory trajectory_from_bytes(const std::string& bytes) {
  auto [r, count] = open_payload(bytes, kTrajMagic, "trajectory");
  Trajectory traj;
  const int dim = static_cast<int>(r.u32());
  if (dim < 1 || dim > kMaxDim) throw TrajectoryFormatError("trajectory: bad dimension");
  const double side = r.f64();
  const BoundaryMode mode = boundary_from(r.u32(), "trajectory");
  traj.box = Box{dim, side, mode};
  const std::uint32_t sys = r.u32();
  if (sys > 3) throw TrajectoryFormatError("trajectory: bad system tag");
  traj.system = static_cast<System>(sys);
  traj.dt = r.f64();
  traj.stride = r.u64();
  traj.seed = r.u64();
  traj.potential = r.str();
  const bool has_xi = r.u32() != 0;
  traj.total_steps = r.u64();
  traj.rejections = r.u64();
  traj.rejection_warning = r.u32() != 0;
  traj.frames.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Frame f;
    f.t = r.f64();
    const std::uint64_t n = r.u64();
    if (has_xi) {
      Vec xi(dim);
      for (int k = 0; k < dim; ++k) xi[k] = r.f64();
      f.xi = xi;
    }
    f.points.reserve(n);
    for (std::uint64_t j = 0; j < n; ++j) {
      Vec p(dim);
      for (int k = 0; k < dim; ++k) p[k] = r.f64();
      f.points.push_back(p);
    }
    traj.frames.push_back(std::move(f));
  }
  if (r.pos != r.limit)
    throw TrajectoryFormatError("trajectory: trailing bytes after the last frame");
  return traj;
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  write_file(path, trajectory_bytes(traj));
}

Trajectory read_trajectory(const std::string& path) {
  return trajectory_from_bytes(read_file(path));
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const int dim = traj.box.dim;
  out << "t,n";
  if (traj.system == System::coup)
    for (int k = 0; k < dim; ++k) out << ",xi_" << k;
  out << ",com_sq_disp\n";
  // Center-of-mass displacement is meaningful only while the particle count
  // matches the first frame; other frames report an empty field.
  const Frame* first = traj.frames.empty() ? nullptr : &traj.frames.front();
  char buf[64];
  for (const auto& f : traj.frames) {
    std::snprintf(buf, sizeof buf, "%.17g", f.t);
    out << buf << "," << f.points.size();
    if (traj.system == System::coup)
      for (int k = 0; k < dim; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", (*f.xi)[k]);
        out << "," << buf;
      }
    if (first && !f.points.empty() && f.points.size() == first->points.size()) {
      Vec d = Vec::zero(dim);
      for (std::size_t i = 0; i < f.points.size(); ++i)
        d += f.points[i] - first->points[i];
      d *= 1.0 / static_cast<double>(f.points.size());
      std::snprintf(buf, sizeof buf, "%.17g", d.norm2());
      out << "," << buf << "\n";
    } else {
      out << ",\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Ensemble files
// ---------------------------------------------------------------------------
std::string ensemble_bytes(const Ensemble& ens, const Box& box, double z) {
  Writer w;
  w.raw(kEnsMagic, 8);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(box.dim));
  w.f64(box.side);
  w.u32(boundary_code(box.mode));
  w.f64(z);
  w.f64(ens.diag.accept_insert);
  w.f64(ens.diag.accept_remove);
  w.f64(ens.diag.accept_displace);
  w.f64(ens.diag.tau_count);
  w.f64(ens.diag.ess);
  w.u64(ens.diag.thinning);
  for (const auto& cfg : ens.samples) {
    w.u64(cfg.points.size());
    for (const auto& p : cfg.points)
      for (int k = 0; k < box.dim; ++k) w.f64(p[k]);
  }
  append_footer(w, ens.samples.size());
  return std::move(w.bytes);
}

void write_ensemble(const std::string& path, const Ensemble& ens, const Box& box,
                    double z) {
  write_file(path, ensemble_bytes(ens, box, z));
}

StoredEnsemble read_ensemble(const std::string& path) {
  const std::string bytes = read_file(path);
  auto [r, count] = open_payload(bytes, kEnsMagic, "ensemble");
  StoredEnsemble out;
  const int dim = static_cast<int>(r.u32());
  if (dim < 1 || dim > kMaxDim) throw TrajectoryFormatError("ensemble: bad dimension");
  const double side = r.f64();
  const BoundaryMode mode = boundary_from(r.u32(), "ensemble");
  out.box = Box{dim, side, mode};
  out.z = r.f64();
  out.ensemble.diag.accept_insert = r.f64();
  out.ensemble.diag.accept_remove = r.f64();
  out.ensemble.diag.accept_displace = r.f64();
  out.ensemble.diag.tau_count = r.f64();
  out.ensemble.diag.ess = r.f64();
  out.ensemble.diag.thinning = r.u64();
  out.ensemble.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t n = r.u64();
    std::vector<Vec> pts;
    pts.reserve(n);
    for (std::uint64_t j = 0; j < n; ++j) {
      Vec p(dim);
      for (int k = 0; k < dim; ++k) p[k] = r.f64();
      pts.push_back(p);
    }
    out.ensemble.samples.push_back(unchecked_configuration(out.box, std::move(pts)));
  }
  if (r.pos != r.limit)
    throw TrajectoryFormatError("ensemble: trailing bytes after the last sample");
  return out;
}

// ---------------------------------------------------------------------------
// File helpers
// ---------------------------------------------------------------------------
void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in && !in.eof()) throw std::runtime_error("read failed: " + path);
  return buf.str();
}

}  // namespace gibbsdyn
