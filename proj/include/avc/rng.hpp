#pragma once

// Seeded random streams.
//
// Generator: std::mt19937_64, whose output sequence is fixed by the C++
// standard. A (seed, stream id) pair is mapped to an engine seed through two
// rounds of SplitMix64, so independent tasks (calibration trials, experiment
// repeats) get decorrelated streams without sharing state. Uniform, normal
// (Marsaglia polar) and binomial (geometric skipping) deviates are derived
// here rather than through <random> distributions, whose algorithms are
// implementation-defined, so a seed pins the same stream on any standard
// library with a correctly rounded log/sqrt.

#include <cstddef>
#include <cstdint>
#include <random>

namespace avc {

std::uint64_t splitmix64(std::uint64_t x);

/// Engine seed for stream `stream_id` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(derive_seed(seed, stream_id));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// 53-bit uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Standard normal deviate.
  double normal();
  /// Exact Binomial(n, p) draw; cost O(n min(p, 1-p)).
  std::size_t binomial(std::size_t n, double p);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace avc
