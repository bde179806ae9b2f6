#ifndef SEQDECON_RNG_HPP
#define SEQDECON_RNG_HPP

#include <cmath>
#include <cstdint>

namespace seqdecon {

/**
 * Counter-based 64-bit PRNG (splitmix64). Draw k of a stream with key s is
 * mix(s + k * GAMMA), so the sequence depends only on (key, counter) and is
 * identical across platforms and thread schedules. Substreams come from
 * derive(), which re-keys with a mixed index so replication order cannot
 * change results.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    return mix(master ^ mix((index + 1) * kGamma));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal() {
    double u1 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  /// Exponential(1) by inverse CDF.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace seqdecon

#endif
