#include "selfsep/rng.hpp"

#include <cmath>
#include <numbers>

#include "selfsep/error.hpp"

namespace selfsep {

namespace {

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t splitmix64_finalize(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

uint64_t mix64(uint64_t a, uint64_t b) {
  uint64_t h = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64_finalize(h);
}

uint64_t hash_label(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= static_cast<uint64_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

RandomSource::RandomSource(uint64_t seed) : seed_(seed) {
  uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64_next(sm);
}

RandomSource RandomSource::substream(uint64_t label) const {
  return RandomSource(mix64(seed_, label));
}

RandomSource RandomSource::substream(std::string_view label) const {
  return substream(hash_label(label));
}

uint64_t RandomSource::next_u64() {
  // xoshiro256++
  const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_uniform(double lo, double hi) {
  require(lo <= hi, ErrorCode::invalid_argument, "uniform bounds out of order");
  return lo + (hi - lo) * next_uniform();
}

double RandomSource::next_normal(double mean, double sd) {
  require(sd >= 0.0, ErrorCode::invalid_argument, "normal sd must be nonnegative");
  // u1 must be strictly positive for the log; 2^-53 offset keeps the draw
  // count at exactly two uniforms without a rejection loop.
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
  const double z = r * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sd * z;
}

}  // namespace selfsep
