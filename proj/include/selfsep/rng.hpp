#pragma once

#include <cstdint>
#include <string_view>

namespace selfsep {

// Blends two 64-bit values into a well-mixed child seed.  Used everywhere a
// deterministic substream is derived from a parent seed and an integer label,
// so the exact construction is part of the reproducibility contract:
//
//   h = a XOR (b + 0x9e3779b97f4a7c15 + (a << 6) + (a >> 2))
//   followed by the splitmix64 finalizer of h.
uint64_t mix64(uint64_t a, uint64_t b);

// FNV-1a 64-bit hash, for turning string labels into substream tags.
uint64_t hash_label(std::string_view label);

// Deterministic random source: xoshiro256++ seeded via splitmix64 expansion
// of a single 64-bit seed.  Copyable; copies continue independently from the
// copied state.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  // The seed this source was constructed with.  Substream derivation uses the
  // construction seed, never the current draw position, so a substream taken
  // before or after any number of draws is the same stream.
  uint64_t seed() const { return seed_; }

  // Child stream with seed mix64(seed(), label).
  RandomSource substream(uint64_t label) const;
  RandomSource substream(std::string_view label) const;

  uint64_t next_u64();

  // Uniform on [0, 1): (next_u64() >> 11) * 2^-53.
  double next_uniform();
  double next_uniform(double lo, double hi);

  // Box-Muller transform consuming exactly two uniforms per call; the second
  // variate is discarded rather than cached, so the draw count per call is
  // fixed and stream-stable.
  double next_normal(double mean, double sd);

 private:
  uint64_t seed_;
  uint64_t state_[4];
};

}  // namespace selfsep
