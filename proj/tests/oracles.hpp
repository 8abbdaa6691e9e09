#pragma once

// Brute-force reference computations over bit strings, used as oracles for
// the level-space engines.

#include "mahh/benchmarks.hpp"
#include "mahh/heuristics.hpp"
#include "mahh/numeric.hpp"


#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

using mahh::Rational;

inline mahh::BitString bits_from_mask(int n, unsigned mask) {
  mahh::BitString x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1U;
  return x;
}

/// Probability that the algorithm accepts a move from fitness fx to fy.
inline Rational acceptance(const mahh::ResolvedAlgorithm& alg, mahh::Fitness fx, mahh::Fitness fy) {
  using mahh::AlgorithmKind;
  const bool improving = fy > fx;
  const bool equal = fy == fx;
  switch (alg.kind) {
    case AlgorithmKind::OnePlusOneEA:
      return improving || equal ? 1 : 0;
    case AlgorithmKind::Metropolis: {
      if (!(fy < fx)) return 1;
      const std::int64_t twice = fx.twice() - fy.twice();
      if (twice % 2 != 0) throw std::logic_error("half-integer gap has no rational acceptance");
      return mahh::integer_power(*alg.alpha.exact, -(twice / 2));
    }
    case AlgorithmKind::MAHH:
    case AlgorithmKind::MAHHGlobal: {
      const Rational p = *alg.p.exact;
      const bool greedy = improving || (equal && alg.acceptance == mahh::Acceptance::ImprovingAndEqual);
      return p + (1 - p) * (greedy ? 1 : 0);
    }
  }
  return 0;
}

/// Exact law of the level after one step from the bit string x, by
/// enumerating every flip position (one-bit) or every mutation mask (global).
inline std::map<int, Rational> step_level_law(const mahh::BenchmarkSpec& bench, const mahh::ResolvedAlgorithm& alg,
                                              const mahh::BitString& x) {
  const int n = bench.n;
  const mahh::Fitness fx = mahh::evaluate(bench, x);
  const int lx = mahh::popcount(x);
  std::map<int, Rational> law;
  if (alg.one_bit()) {
    for (int pos = 0; pos < n; ++pos) {
      mahh::BitString y = x;
      y[pos] ^= 1U;
      const Rational a = acceptance(alg, fx, mahh::evaluate(bench, y));
      law[mahh::popcount(y)] += a / n;
      law[lx] += (1 - a) / n;
    }
    return law;
  }
  const Rational q(1, n);
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    mahh::BitString y = x;
    int flips = 0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1U) {
        y[i] ^= 1U;
        ++flips;
      }
    }
    const Rational prob = mahh::integer_power(q, flips) * mahh::integer_power(Rational(1) - q, n - flips);
    const Rational a = acceptance(alg, fx, mahh::evaluate(bench, y));
    law[mahh::popcount(y)] += prob * a;
    law[lx] += prob * (1 - a);
  }
  return law;
}

/// Level transition probability of pure standard bit mutation, by masks.
inline Rational mask_kernel(int n, int i, int j) {
  const Rational q(1, n);
  Rational total = 0;
  for (unsigned mask = 0; mask < (1U << n); ++mask) {
    int a = 0;  // zeros flipped up
    int b = 0;  // ones flipped down
    for (int bit = 0; bit < n; ++bit) {
      if (!((mask >> bit) & 1U)) continue;
      if (bit < i) {
        ++b;
      } else {
        ++a;
      }
    }
    if (i + a - b != j) continue;
    total += mahh::integer_power(q, a + b) * mahh::integer_power(Rational(1) - q, n - a - b);
  }
  return total;
}

}  // namespace oracle
