#pragma once

#include "mahh/benchmarks.hpp"
#include "mahh/heuristics.hpp"
#include "mahh/numeric.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mahh {

enum class ChainStructure { BirthDeath, Dense };

/// Exact one-iteration law of the number of one-bits. Entry (i, j) is the
/// probability of moving from level i to level j; absorbing levels have a
/// unit self-loop.
template <class S>
struct LevelChain {
  int n = 0;
  ChainStructure structure = ChainStructure::BirthDeath;
  std::vector<S> trans;        // (n+1) x (n+1), row-major
  std::vector<int> absorbing;  // {n} unless rebuilt with with_absorbing()

  static constexpr Backend backend = ScalarTraits<S>::backend;

  int size() const { return n + 1; }
  const S& at(int i, int j) const { return trans[static_cast<std::size_t>(i) * size() + j]; }
  S& at(int i, int j) { return trans[static_cast<std::size_t>(i) * size() + j]; }
  /// p_i^+ and p_i^- of a birth-death chain (zero off the ends).
  S up(int i) const { return i < n ? at(i, i + 1) : S(0); }
  S down(int i) const { return i > 0 ? at(i, i - 1) : S(0); }
  bool is_absorbing(int level) const;
};

using RationalChain = LevelChain<Rational>;
using RealChain = LevelChain<Real>;

/// One-bit algorithms give birth-death chains; global mutation gives dense ones.
/// The Rational instantiation throws DomainError when a transition probability
/// is irrational (p = m/(8en), or Metropolis on half-integer fitness gaps).
template <class S>
LevelChain<S> build_level_chain(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg);

/// True when every transition probability of the chain is rational.
bool rational_representable(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg);

/// Probability that standard bit mutation (rate 1/n) moves level i to level j.
ExactValue mutation_level_kernel(int n, int i, int j);

/// Row i of the mutation kernel. The Real version drops binomial terms below
/// 1e-60, which is under the working precision of every row entry.
template <class S>
std::vector<S> mutation_kernel_row(int n, int i);

/// E[T_i^+] for i = 0..n-1 by the forward recurrence
/// E[T_i^+] = 1/p_i^+ + (p_i^-/p_i^+) E[T_{i-1}^+].
template <class S>
std::vector<ExactValue> hitting_time_recurrence(const LevelChain<S>& chain);

/// E[T_i^+] as the explicit sum over return levels k of
/// (1/p_k^+) * prod_{l=k+1..i} p_l^-/p_l^+.
template <class S>
ExactValue hitting_time_closed_form(const LevelChain<S>& chain, int i);

/// Expected absorption time from every level by a direct linear solve.
/// Levels from which absorption is not certain get the infinity flag.
template <class S>
std::vector<ExactValue> absorbing_hitting_times(const LevelChain<S>& chain);

template <class S>
ExactValue absorbing_expected_time(const LevelChain<S>& chain, std::span<const S> start);

/// Probability of being absorbed in `target` (which must be absorbing), per level.
template <class S>
std::vector<S> absorption_probabilities(const LevelChain<S>& chain, int target);

/// Copy of the chain in which the given levels are absorbing.
template <class S>
LevelChain<S> with_absorbing(LevelChain<S> chain, std::vector<int> levels);

/// Level law of the initial solution: Binomial(n, 1/2) or a point mass.
template <class S>
std::vector<S> initial_distribution(int n, const InitSpec& init);

struct ExactOptions {
  std::optional<Backend> backend;  // forced backend; otherwise chosen automatically
  int rational_crossover = 64;     // largest birth-death n solved with rationals
  int dense_rational_crossover = 32;  // largest dense n solved with rationals
};

Backend choose_backend(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const ExactOptions& options = {});

ExactValue expected_runtime_exact(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                                  const ExactOptions& options = {});

/// One row per level, entries separated by spaces, rationals as `num/den`.
template <class S>
void write_chain_matrix(std::ostream& os, const LevelChain<S>& chain);

/// CSV `level,expected_time` with `inf` for infinite entries.
void write_hitting_times_csv(std::ostream& os, const std::vector<ExactValue>& times);

/// Row of the chain as doubles, for sampling.
template <class S>
std::vector<double> row_as_double(const LevelChain<S>& chain, int i);

}  // namespace mahh
