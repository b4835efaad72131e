#pragma once

#include <cstdint>
#include <random>

namespace deconv {

/// Counter-based stream derivation: the stream for task `index` under a run
/// seed is seeded with splitmix64(seed ^ splitmix64(index + 1)). Every
/// parallel task derives its own stream this way, so results never depend
/// on how tasks are distributed over workers.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// 64-bit Mersenne Twister with a portable uniform draw. std::*_distribution
/// output is implementation-defined, so samplers go through uniform01().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_task(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_seed(seed, index));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1): never returns 0, for inverse-CDF sampling.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deconv
