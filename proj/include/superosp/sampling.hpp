#ifndef SUPEROSP_SAMPLING_HPP
#define SUPEROSP_SAMPLING_HPP

#include <cstdint>

#include "superosp/supermodule.hpp"

// Deterministic, platform-independent sampling for the randomized identity
// sweeps.  splitmix64 is fixed by its recurrence, unlike <random>
// distributions, so seeded reports are reproducible everywhere.

namespace superosp {

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [lo, hi].
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
  Parity parity() { return (next() & 1) ? Parity::odd : Parity::even; }
  /// Small rational with numerator in [-3,3], denominator in {1,2}.
  Rat small_rat() { return Rat(uniform(-3, 3), uniform(1, 2)); }
};

/// Random homogeneous module element of the given degree (may be zero).
ModuleElement random_homogeneous(SplitMix64& rng, const ModulePtr& mod,
                                 Parity p);
/// Random homogeneous algebra element of the given degree.
AlgebraElement random_homogeneous(SplitMix64& rng, const TablePtr& tab,
                                  Parity p);

}  // namespace superosp

#endif
