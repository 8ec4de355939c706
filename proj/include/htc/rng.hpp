#pragma once

#include <cstdint>

namespace htc {

/// Seedable, splittable 64-bit PRNG (splitmix64). Every sampling operation in
/// the library takes an explicit stream, so a (config, seed) pair fully
/// determines all outputs. Streams are single-owner: concurrent callers must
/// derive independent substreams instead of sharing one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in the open interval (0, 1); safe to feed into inverse
  /// CDFs that diverge at the endpoints.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child stream seeded from this stream's next output (advances *this).
  RandomStream split() { return RandomStream(next_u64()); }

  /// Seed this stream was created with (reported in results for reruns).
  std::uint64_t seed() const { return seed_; }

  /// Stateless derivation of the seed for substream `index` of `base`.
  /// Used for per-row streams in parameter sweeps: each row can be rerun in
  /// isolation from its own reported seed.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace htc
