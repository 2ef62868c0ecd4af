// Binary persistence for trajectories and ensembles, plus a CSV exporter for
// per-frame observables.  Both binary formats are explicit little-endian
// layouts with a magic tag, a format version, and an FNV-1a checksum footer;
// round trips are bit-exact.  Layouts are documented in docs/formats.md.
#pragma once

#include <stdexcept>
#include <string>

#include "gibbsdyn/dynamics.hpp"
#include "gibbsdyn/gibbs.hpp"

namespace gibbsdyn {

class TrajectoryFormatError : public std::runtime_error {
 public:
  explicit TrajectoryFormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Serialize to bytes (shared by the file writers and the round-trip tests).
std::string trajectory_bytes(const Trajectory& traj);
Trajectory trajectory_from_bytes(const std::string& bytes);

void write_trajectory(const std::string& path, const Trajectory& traj);
// Throws TrajectoryFormatError on bad magic, version mismatch, checksum
// mismatch, or truncation; std::runtime_error on I/O failure.
Trajectory read_trajectory(const std::string& path);

// Per-frame observables only (no raw coordinates): time, particle count,
// tagged coordinates when present, and the squared displacement of the
// center of mass from the first frame.
std::string trajectory_csv(const Trajectory& traj);

// Ensemble persistence (same conventions).
std::string ensemble_bytes(const Ensemble& ens, const Box& box, double z);
void write_ensemble(const std::string& path, const Ensemble& ens, const Box& box,
                    double z);
struct StoredEnsemble {
  Ensemble ensemble;
  Box box;
  double z = 0;
};
StoredEnsemble read_ensemble(const std::string& path);

// Small file helpers used across the runner.
void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace gibbsdyn
