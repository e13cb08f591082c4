#pragma once

#include <cmath>
#include <cstdint>

namespace stirring {

// Deterministic xoshiro256++ stream seeded through splitmix64.
//
// Replica r of an experiment must draw from substream(r), derived from the
// run seed, never from a shared sequential stream: that keeps results
// identical no matter how replicas are scheduled across workers.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

  // Poisson(mean), counting unit-rate exponential arrivals in [0, mean].
  // O(mean) draws; desk-scale means stay in the low thousands.
  std::uint64_t next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::uint64_t count = 0;
    double acc = exponential_draw();
    while (acc <= mean) {
      ++count;
      acc += exponential_draw();
    }
    return count;
  }

  // Independent stream for replica `index`. Derivation uses the stored seed,
  // not the current state, so it never depends on how much was consumed.
  RandomStream substream(std::uint64_t index) const { return RandomStream(mix(seed_, index)); }

 private:
  double exponential_draw() { return -std::log1p(-next_unit()); }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (0x9E3779B97F4A7C15ULL + (b << 1) + (a >> 7));
    std::uint64_t h = splitmix64(x);
    std::uint64_t y = h + b;
    return splitmix64(y);
  }

  std::uint64_t state_[4];
  std::uint64_t seed_;
};

}  // namespace stirring
