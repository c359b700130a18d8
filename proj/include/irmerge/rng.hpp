#pragma once

#include <cstdint>

namespace irmerge {

// Deterministic generator with stable cross-platform output (the standard
// distributions are implementation-defined, so sampling is done by hand).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {  // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) { return n ? next_u64() % n : 0; }

  // [lo, hi)
  long long range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<uint64_t>(hi - lo)));
  }

  double uniform01() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  double gaussian() {  // Box-Muller
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    return __builtin_sqrt(-2.0 * __builtin_log(u1)) *
           __builtin_cos(6.283185307179586 * u2);
  }

  bool chance(double p) { return uniform01() < p; }

 private:
  uint64_t state_;
};

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  Rng r(base ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return r.next_u64();
}

}  // namespace irmerge
