#pragma once

// Deterministic random number streams.
//
// All randomness in the library flows through RngStream, a thin wrapper
// around std::mt19937_64 (whose output sequence is fully specified by the
// C++ standard) with explicit uniform/normal transforms. The standard
// library *distributions* are deliberately not used: their algorithms are
// implementation-defined, which would break reproducibility of archived
// experiment outputs across toolchains.
//
// Independent streams for concurrent tasks are derived from a master seed
// and a task index via splitmix64, so results never depend on scheduling
// or on the number of workers.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace cubewalk {

/// One round of the splitmix64 generator; also a good 64-bit mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed for the stream owned by task `task_index` under `master_seed`.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t task_index) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (task_index + 0x9E3779B97F4A7C15ull);
  return splitmix64(s);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1): top 53 bits of the engine output.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Uniform on [-1, 1).
  double uniform_sym() { return 2.0 * uniform01() - 1.0; }

  /// Standard normal via the Marsaglia polar method (one spare cached).
  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_sym();
      v = uniform_sym();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cubewalk
