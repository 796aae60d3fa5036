#pragma once

// Hand-rolled generators for property tests. Each case index gets its own
// stream so a failing case can be replayed by index alone.

#include <cstdint>
#include <vector>

#include "cebp/offspring.hpp"
#include "cebp/rng.hpp"

namespace cebp::testgen {

inline Rng case_rng(std::uint64_t suite, std::uint64_t index) {
  return make_stream(suite, StreamTag::test, index);
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Random supercritical parametric family.
inline FamilySpec parametric_family(Rng& rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: return FamilySpec::geometric(uniform(rng, 0.05, 0.95));
    case 1: return FamilySpec::poisson(uniform(rng, 0.05, 6.0));
    default: return FamilySpec::fixed(uniform_int(rng, 2, 6));
  }
}

/// Random pmf on a few even integers in [2, 2 * max_pairs], mean > 2.
inline std::vector<PmfEntry> bounded_pmf(Rng& rng, int max_pairs) {
  for (;;) {
    std::vector<PmfEntry> pmf;
    double total = 0.0;
    for (int b = 1; b <= max_pairs; ++b) {
      if (b > 1 && coin(rng)) continue;
      const double w = uniform(rng, 0.05, 1.0);
      pmf.push_back({2 * b, w});
      total += w;
    }
    double mean = 0.0;
    for (auto& e : pmf) {
      e.p /= total;
      mean += e.z * e.p;
    }
    // renormalise exactly so the mass check passes
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) s += pmf[i].p;
    pmf.back().p = 1.0 - s;
    if (pmf.size() >= 2 && mean > 2.05) return pmf;
  }
}

}  // namespace cebp::testgen
