#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace irec {

// Seeded generator with platform-independent derived draws. The standard
// distributions are implementation-defined, so uniform reals and bounded
// integers are computed from raw engine output here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for one entity (user, replication, ...): seed xor id.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed ^ stream);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1}; n must be positive. Rejection sampling keeps it
  // exactly uniform.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
  }

  // Standard normal via Box-Muller (one value per call).
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace irec
