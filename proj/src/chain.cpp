#include "mahh/chain.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

namespace mahh {

namespace {

template <class S>
S metropolis_acceptance(const ResolvedAlgorithm& alg, std::int64_t delta_twice);

template <>
Rational metropolis_acceptance<Rational>(const ResolvedAlgorithm& alg, std::int64_t delta_twice) {
  if (delta_twice % 2 != 0) {
    throw DomainError("Metropolis acceptance alpha^(" + std::to_string(delta_twice) +
                      "/2) is irrational; use the LogFloat backend");
  }
  return integer_power(*alg.alpha.exact, delta_twice / 2);
}

template <>
Real metropolis_acceptance<Real>(const ResolvedAlgorithm& alg, std::int64_t delta_twice) {
  if (delta_twice % 2 == 0) return integer_power(alg.alpha.approx, delta_twice / 2);
  return mp::pow(alg.alpha.approx, Real(delta_twice) / 2);
}

template <class S>
S acceptance_probability(const ResolvedAlgorithm& alg, const S& p, Fitness parent, Fitness child) {
  switch (alg.kind) {
    case AlgorithmKind::MAHH:
    case AlgorithmKind::MAHHGlobal:
      if (child > parent) return S(1);
      if (child == parent && alg.acceptance == Acceptance::ImprovingAndEqual) return S(1);
      return p;
    case AlgorithmKind::Metropolis:
      if (child >= parent) return S(1);
      return metropolis_acceptance<S>(alg, child.twice() - parent.twice());
    case AlgorithmKind::OnePlusOneEA:
      return child >= parent ? S(1) : S(0);
  }
  throw ContractViolation("unknown algorithm kind");
}

template <class S>
S mixing_parameter(const ResolvedAlgorithm& alg) {
  if (alg.kind == AlgorithmKind::MAHH || alg.kind == AlgorithmKind::MAHHGlobal) {
    return ScalarTraits<S>::from_param(alg.p);
  }
  return S(0);
}

// Index-compressed dense system A x = b solved by Gaussian elimination. The
// systems here are (I - Q) for substochastic Q, so pivots are positive; a
// row swap is attempted anyway before reporting singularity.
template <class S>
std::vector<S> solve_dense(std::vector<S> a, std::vector<S> b, std::size_t size) {
  auto idx = [size](std::size_t r, std::size_t c) { return r * size + c; };
  std::vector<std::size_t> nonzero;
  for (std::size_t k = 0; k < size; ++k) {
    if (a[idx(k, k)] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < size && a[idx(swap_row, k)] == 0) ++swap_row;
      if (swap_row == size) throw std::runtime_error("singular absorbing-chain system");
      for (std::size_t c = 0; c < size; ++c) std::swap(a[idx(k, c)], a[idx(swap_row, c)]);
      std::swap(b[k], b[swap_row]);
    }
    nonzero.clear();
    for (std::size_t c = k + 1; c < size; ++c) {
      if (a[idx(k, c)] != 0) nonzero.push_back(c);
    }
    const S inv_pivot = S(1) / a[idx(k, k)];
    for (std::size_t r = k + 1; r < size; ++r) {
      if (a[idx(r, k)] == 0) continue;
      const S factor = a[idx(r, k)] * inv_pivot;
      a[idx(r, k)] = 0;
      for (std::size_t c : nonzero) a[idx(r, c)] -= factor * a[idx(k, c)];
      b[r] -= factor * b[k];
    }
  }
  std::vector<S> x(size);
  for (std::size_t k = size; k-- > 0;) {
    S acc = b[k];
    for (std::size_t c = k + 1; c < size; ++c) {
      if (a[idx(k, c)] != 0) acc -= a[idx(k, c)] * x[c];
    }
    x[k] = acc / a[idx(k, k)];
  }
  return x;
}

/// Levels from which some level in `targets` is reachable with positive probability.
template <class S>
std::vector<bool> can_reach(const LevelChain<S>& chain, const std::vector<bool>& targets) {
  const int size = chain.size();
  std::vector<bool> reach = targets;
  std::deque<int> queue;
  for (int i = 0; i < size; ++i) {
    if (reach[i]) queue.push_back(i);
  }
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    for (int i = 0; i < size; ++i) {
      if (!reach[i] && chain.at(i, j) != 0) {
        reach[i] = true;
        queue.push_back(i);
      }
    }
  }
  return reach;
}

/// Levels whose absorption is certain (they cannot reach a level that cannot be absorbed).
template <class S>
std::vector<bool> certainly_absorbed(const LevelChain<S>& chain) {
  std::vector<bool> absorbing(chain.size(), false);
  for (int a : chain.absorbing) absorbing[a] = true;
  const std::vector<bool> reaches_absorbing = can_reach(chain, absorbing);
  std::vector<bool> stuck(chain.size());
  for (int i = 0; i < chain.size(); ++i) stuck[i] = !reaches_absorbing[i];
  const std::vector<bool> reaches_stuck = can_reach(chain, stuck);
  std::vector<bool> finite(chain.size());
  for (int i = 0; i < chain.size(); ++i) finite[i] = !reaches_stuck[i];
  return finite;
}

}  // namespace

template <class S>
bool LevelChain<S>::is_absorbing(int level) const {
  return std::find(absorbing.begin(), absorbing.end(), level) != absorbing.end();
}

bool rational_representable(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg) {
  if ((alg.kind == AlgorithmKind::MAHH || alg.kind == AlgorithmKind::MAHHGlobal) && !alg.p.exact) return false;
  if (alg.kind == AlgorithmKind::Metropolis) {
    for (int i = 0; i < bench.n; ++i) {
      const std::int64_t gap = level_fitness(bench, i + 1).twice() - level_fitness(bench, i).twice();
      if (gap % 2 != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- mutation kernel

ExactValue mutation_level_kernel(int n, int i, int j) {
  if (n < 1 || i < 0 || i > n || j < 0 || j > n) {
    throw DomainError("mutation_level_kernel needs 0 <= i, j <= n and n >= 1");
  }
  // sum over b of C(n-i, a) C(i, b) (n-1)^(n-a-b) / n^n with a = b + j - i
  Integer numerator = 0;
  for (int b = 0; b <= i; ++b) {
    const int a = b + j - i;
    if (a < 0 || a > n - i) continue;
    Integer term = binomial(static_cast<unsigned>(n - i), static_cast<unsigned>(a)) *
                   binomial(static_cast<unsigned>(i), static_cast<unsigned>(b));
    term *= mp::pow(Integer(n - 1), static_cast<unsigned>(n - a - b));
    numerator += term;
  }
  return ExactValue(Rational(numerator, mp::pow(Integer(n), static_cast<unsigned>(n))));
}

template <>
std::vector<Rational> mutation_kernel_row<Rational>(int n, int i) {
  std::vector<Rational> row(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) row[j] = mutation_level_kernel(n, i, j).rational();
  return row;
}

namespace {

/// Binomial(count, rate) pmf with negligible upper-tail terms dropped.
std::vector<Real> truncated_binomial_pmf(int count, const Real& rate) {
  static const Real cutoff("1e-60");
  std::vector<Real> pmf;
  if (rate == 1) {
    pmf.assign(static_cast<std::size_t>(count) + 1, Real(0));
    pmf[count] = 1;
    return pmf;
  }
  const Real odds = rate / (1 - rate);
  Real term = mp::pow(1 - rate, count);
  const Real mean = rate * count;
  for (int k = 0; k <= count; ++k) {
    pmf.push_back(term);
    if (k > mean && term < cutoff) break;
    term *= Real(count - k) / Real(k + 1) * odds;
  }
  return pmf;
}

}  // namespace

template <>
std::vector<Real> mutation_kernel_row<Real>(int n, int i) {
  if (n < 1 || i < 0 || i > n) throw DomainError("mutation_kernel_row needs 0 <= i <= n and n >= 1");
  const Real rate = Real(1) / Real(n);
  const std::vector<Real> ups = truncated_binomial_pmf(n - i, rate);
  const std::vector<Real> downs = truncated_binomial_pmf(i, rate);
  std::vector<Real> row(static_cast<std::size_t>(n) + 1, Real(0));
  for (std::size_t a = 0; a < ups.size(); ++a) {
    for (std::size_t b = 0; b < downs.size(); ++b) {
      row[static_cast<std::size_t>(i + static_cast<int>(a) - static_cast<int>(b))] += ups[a] * downs[b];
    }
  }
  return row;
}

// ---------------------------------------------------------------- chain construction

template <class S>
LevelChain<S> build_level_chain(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg) {
  bench.validate();
  const int n = bench.n;
  LevelChain<S> chain;
  chain.n = n;
  chain.structure = alg.one_bit() ? ChainStructure::BirthDeath : ChainStructure::Dense;
  chain.trans.assign(static_cast<std::size_t>(n + 1) * (n + 1), S(0));
  chain.absorbing = {global_optimum_level(bench)};

  const S p = mixing_parameter<S>(alg);
  std::vector<Fitness> fitness(static_cast<std::size_t>(n) + 1);
  for (int l = 0; l <= n; ++l) fitness[l] = level_fitness(bench, l);

  for (int i = 0; i < n; ++i) {
    S leave(0);
    if (alg.one_bit()) {
      if (i < n) {
        chain.at(i, i + 1) = S(n - i) / S(n) * acceptance_probability<S>(alg, p, fitness[i], fitness[i + 1]);
        leave += chain.at(i, i + 1);
      }
      if (i > 0) {
        chain.at(i, i - 1) = S(i) / S(n) * acceptance_probability<S>(alg, p, fitness[i], fitness[i - 1]);
        leave += chain.at(i, i - 1);
      }
    } else {
      const std::vector<S> kernel = mutation_kernel_row<S>(n, i);
      for (int j = 0; j <= n; ++j) {
        if (j == i || kernel[j] == 0) continue;
        chain.at(i, j) = kernel[j] * acceptance_probability<S>(alg, p, fitness[i], fitness[j]);
        leave += chain.at(i, j);
      }
    }
    chain.at(i, i) = S(1) - leave;
  }
  chain.at(n, n) = S(1);
  return chain;
}

// ---------------------------------------------------------------- solvers

template <class S>
std::vector<ExactValue> hitting_time_recurrence(const LevelChain<S>& chain) {
  if (chain.structure != ChainStructure::BirthDeath) {
    throw ContractViolation("hitting_time_recurrence needs a birth-death chain");
  }
  std::vector<ExactValue> out;
  out.reserve(static_cast<std::size_t>(chain.n));
  std::optional<S> previous;  // E[T_{i-1}^+], nullopt when infinite
  for (int i = 0; i < chain.n; ++i) {
    const S up = chain.up(i);
    const S down = chain.down(i);
    std::optional<S> current;
    if (up != 0) {
      if (down == 0) {
        current = S(1) / up;
      } else if (previous) {
        current = S(1) / up + down / up * *previous;
      }
    }
    out.push_back(current ? ExactValue(*current) : ExactValue::infinity(chain.backend));
    previous = current;
  }
  return out;
}

template <class S>
ExactValue hitting_time_closed_form(const LevelChain<S>& chain, int i) {
  if (chain.structure != ChainStructure::BirthDeath) {
    throw ContractViolation("hitting_time_closed_form needs a birth-death chain");
  }
  if (i < 0 || i >= chain.n) throw DomainError("level " + std::to_string(i) + " outside [0, n-1]");

  // Terms with k below the highest level that can't step up are unreachable
  // when some p_l^- in between vanishes; otherwise the time is infinite.
  int first = 0;
  for (int k = i; k >= 0; --k) {
    if (chain.up(k) != 0) continue;
    bool reachable = true;
    for (int l = k + 1; l <= i; ++l) reachable = reachable && chain.down(l) != 0;
    if (reachable) return ExactValue::infinity(chain.backend);
    first = k + 1;
    break;
  }

  S sum(0);
  for (int k = first; k <= i; ++k) {
    S product(1);
    for (int l = k + 1; l <= i; ++l) product *= chain.down(l) / chain.up(l);
    sum += product / chain.up(k);
  }
  return ExactValue(sum);
}

template <class S>
std::vector<ExactValue> absorbing_hitting_times(const LevelChain<S>& chain) {
  const int size = chain.size();
  const std::vector<bool> finite = certainly_absorbed(chain);

  std::vector<int> index(size, -1);
  std::vector<int> transient;
  for (int i = 0; i < size; ++i) {
    if (finite[i] && !chain.is_absorbing(i)) {
      index[i] = static_cast<int>(transient.size());
      transient.push_back(i);
    }
  }
  const std::size_t t = transient.size();
  std::vector<S> a(t * t, S(0));
  std::vector<S> b(t, S(1));
  for (std::size_t r = 0; r < t; ++r) {
    const int i = transient[r];
    for (int j = 0; j < size; ++j) {
      if (index[j] < 0) continue;
      const S& q = chain.at(i, j);
      if (q == 0 && i != j) continue;
      a[r * t + static_cast<std::size_t>(index[j])] = (i == j ? S(1) : S(0)) - q;
    }
  }
  const std::vector<S> h = t > 0 ? solve_dense(std::move(a), std::move(b), t) : std::vector<S>{};

  std::vector<ExactValue> out;
  out.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    if (!finite[i]) {
      out.push_back(ExactValue::infinity(chain.backend));
    } else if (chain.is_absorbing(i)) {
      out.push_back(ExactValue(S(0)));
    } else {
      out.push_back(ExactValue(h[static_cast<std::size_t>(index[i])]));
    }
  }
  return out;
}

template <class S>
ExactValue absorbing_expected_time(const LevelChain<S>& chain, std::span<const S> start) {
  if (static_cast<int>(start.size()) != chain.size()) {
    throw DomainError("start distribution has " + std::to_string(start.size()) + " entries, expected " +
                      std::to_string(chain.size()));
  }
  const std::vector<ExactValue> h = absorbing_hitting_times(chain);
  S total(0);
  for (int i = 0; i < chain.size(); ++i) {
    if (start[i] == 0) continue;
    if (h[i].is_infinite()) return ExactValue::infinity(chain.backend);
    if constexpr (std::is_same_v<S, Rational>) {
      total += start[i] * h[i].rational();
    } else {
      total += start[i] * h[i].real();
    }
  }
  return ExactValue(total);
}

template <class S>
std::vector<S> absorption_probabilities(const LevelChain<S>& chain, int target) {
  if (!chain.is_absorbing(target)) throw DomainError("target level must be absorbing");
  const int size = chain.size();
  std::vector<int> index(size, -1);
  std::vector<int> transient;
  for (int i = 0; i < size; ++i) {
    if (!chain.is_absorbing(i)) {
      index[i] = static_cast<int>(transient.size());
      transient.push_back(i);
    }
  }
  // Levels that cannot reach any absorbing level would make the system singular;
  // they are absorbed with probability 0, so pin them with an identity row.
  std::vector<bool> absorbing(size, false);
  for (int a : chain.absorbing) absorbing[a] = true;
  const std::vector<bool> reaches = can_reach(chain, absorbing);

  const std::size_t t = transient.size();
  std::vector<S> a(t * t, S(0));
  std::vector<S> b(t, S(0));
  for (std::size_t r = 0; r < t; ++r) {
    const int i = transient[r];
    if (!reaches[i]) {
      a[r * t + r] = 1;
      continue;
    }
    for (int j = 0; j < size; ++j) {
      const S& q = chain.at(i, j);
      if (index[j] >= 0) {
        a[r * t + static_cast<std::size_t>(index[j])] = (i == j ? S(1) : S(0)) - q;
      } else if (j == target) {
        b[r] += q;
      }
    }
  }
  const std::vector<S> u = t > 0 ? solve_dense(std::move(a), std::move(b), t) : std::vector<S>{};
  std::vector<S> out(static_cast<std::size_t>(size), S(0));
  for (int i = 0; i < size; ++i) {
    if (index[i] >= 0) {
      out[i] = u[static_cast<std::size_t>(index[i])];
    } else {
      out[i] = i == target ? S(1) : S(0);
    }
  }
  return out;
}

template <class S>
LevelChain<S> with_absorbing(LevelChain<S> chain, std::vector<int> levels) {
  for (int level : levels) {
    if (level < 0 || level > chain.n) throw DomainError("absorbing level outside [0, n]");
    for (int j = 0; j < chain.size(); ++j) chain.at(level, j) = S(0);
    chain.at(level, level) = S(1);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  chain.absorbing = std::move(levels);
  chain.structure = ChainStructure::Dense;
  return chain;
}

template <class S>
std::vector<S> initial_distribution(int n, const InitSpec& init) {
  std::vector<S> start(static_cast<std::size_t>(n) + 1, S(0));
  if (const auto* at = std::get_if<AtLevelInit>(&init)) {
    if (at->level < 0 || at->level > n) throw DomainError("initial level outside [0, n]");
    start[at->level] = S(1);
    return start;
  }
  const Integer total = mp::pow(Integer(2), static_cast<unsigned>(n));
  for (int k = 0; k <= n; ++k) {
    start[k] = ScalarTraits<S>::from_rational(
        Rational(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)), total));
  }
  return start;
}

// ---------------------------------------------------------------- exact runtime

Backend choose_backend(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const ExactOptions& options) {
  if (options.backend) return *options.backend;
  if (!rational_representable(bench, alg)) return Backend::LogFloat;
  const int limit = alg.one_bit() ? options.rational_crossover : options.dense_rational_crossover;
  return bench.n <= limit ? Backend::Rational : Backend::LogFloat;
}

namespace {

template <class S>
ExactValue expected_runtime_with(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init) {
  const LevelChain<S> chain = build_level_chain<S>(bench, alg);
  const std::vector<S> start = initial_distribution<S>(bench.n, init);
  return absorbing_expected_time<S>(chain, start);
}

}  // namespace

ExactValue expected_runtime_exact(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                                  const ExactOptions& options) {
  if (choose_backend(bench, alg, options) == Backend::Rational) {
    return expected_runtime_with<Rational>(bench, alg, init);
  }
  return expected_runtime_with<Real>(bench, alg, init);
}

// ---------------------------------------------------------------- export

template <class S>
void write_chain_matrix(std::ostream& os, const LevelChain<S>& chain) {
  os << "# level chain n=" << chain.n
     << " structure=" << (chain.structure == ChainStructure::BirthDeath ? "birth-death" : "dense")
     << " backend=" << to_string(chain.backend) << '\n';
  for (int i = 0; i < chain.size(); ++i) {
    for (int j = 0; j < chain.size(); ++j) {
      if (j > 0) os << ' ';
      os << ExactValue(chain.at(i, j)).to_string(true, 25);
    }
    os << '\n';
  }
}

void write_hitting_times_csv(std::ostream& os, const std::vector<ExactValue>& times) {
  os << "level,expected_time\n";
  for (std::size_t i = 0; i < times.size(); ++i) os << i << ',' << times[i].to_string(false, 17) << '\n';
}

template <class S>
std::vector<double> row_as_double(const LevelChain<S>& chain, int i) {
  std::vector<double> row(static_cast<std::size_t>(chain.size()));
  for (int j = 0; j < chain.size(); ++j) row[j] = static_cast<double>(chain.at(i, j));
  return row;
}

#define MAHH_INSTANTIATE_CHAIN(S)                                                                       \
  template struct LevelChain<S>;                                                                        \
  template LevelChain<S> build_level_chain<S>(const BenchmarkSpec&, const ResolvedAlgorithm&);          \
  template std::vector<ExactValue> hitting_time_recurrence<S>(const LevelChain<S>&);                    \
  template ExactValue hitting_time_closed_form<S>(const LevelChain<S>&, int);                           \
  template std::vector<ExactValue> absorbing_hitting_times<S>(const LevelChain<S>&);                    \
  template ExactValue absorbing_expected_time<S>(const LevelChain<S>&, std::span<const S>);             \
  template std::vector<S> absorption_probabilities<S>(const LevelChain<S>&, int);                       \
  template LevelChain<S> with_absorbing<S>(LevelChain<S>, std::vector<int>);                            \
  template std::vector<S> initial_distribution<S>(int, const InitSpec&);                                \
  template void write_chain_matrix<S>(std::ostream&, const LevelChain<S>&);                             \
  template std::vector<double> row_as_double<S>(const LevelChain<S>&, int);

MAHH_INSTANTIATE_CHAIN(Rational)
MAHH_INSTANTIATE_CHAIN(Real)

#undef MAHH_INSTANTIATE_CHAIN

}  // namespace mahh
