// Deterministic random-number streams.
//
// Every stochastic component takes an explicit 64-bit seed and derives its own
// substreams with splitmix64, so runs are reproducible regardless of how many
// draws each component consumes.
#pragma once

#include <cstdint>
#include <random>

namespace gibbsdyn {

// splitmix64: tiny, well-mixed 64->64 hash.  Used both to expand user seeds
// into independent substream seeds and as a cheap content hash mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive the seed of substream `index` of a master seed.  Distinct indices
// give statistically independent mt19937_64 streams for practical purposes.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x517cc1b727220a95ULL));
}

// A seeded stream with the handful of draw types the library needs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return unif_(engine_); }                  // U[0,1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }                 // N(0,1)
  // Uniform integer in {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::uint64_t raw() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gibbsdyn
