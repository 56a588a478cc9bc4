#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace morreylab {

// Deterministic RNG for randomized test families. Every consumer takes an
// explicit seed so reports and tests are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  // uniform in [0,1)
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // dyadic rational in [0,1) with `bits` significand bits; finite sums of these
  // stay exact in double arithmetic, which the exact-equality oracles rely on
  double lattice(int bits = 20) {
    return static_cast<double>(eng_() >> (64 - bits)) * std::ldexp(1.0, -bits);
  }

  std::uint64_t below(std::uint64_t n) { return n ? eng_() % n : 0; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace morreylab
