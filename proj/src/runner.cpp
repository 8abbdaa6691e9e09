#include "mahh/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace mahh {

unsigned default_thread_count() {
  if (const char* env = std::getenv("MAHH_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// processed exactly once; callers write results by index.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body body) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(count, 1)));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (std::uint64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

}  // namespace

BatchStats summarize(const std::vector<std::uint64_t>& iterations, const std::vector<bool>& truncated,
                     TruncationPolicy policy) {
  BatchStats stats;
  stats.policy = policy;
  stats.truncation_count = static_cast<std::uint64_t>(std::count(truncated.begin(), truncated.end(), true));
  double sum = 0.0;
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    if (policy == TruncationPolicy::Exclude && truncated[i]) continue;
    sum += static_cast<double>(iterations[i]);
    ++used;
  }
  stats.trials = used;
  if (used == 0) return stats;
  stats.mean = sum / static_cast<double>(used);
  double squares = 0.0;
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    if (policy == TruncationPolicy::Exclude && truncated[i]) continue;
    const double d = static_cast<double>(iterations[i]) - stats.mean;
    squares += d * d;
  }
  stats.variance = used > 1 ? squares / static_cast<double>(used - 1) : 0.0;
  stats.std_error = std::sqrt(stats.variance / static_cast<double>(used));
  return stats;
}

BatchStats run_batch(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                     std::uint64_t trials, std::uint64_t max_iters, std::uint64_t base_seed,
                     const BatchOptions& options) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  std::vector<std::uint64_t> iterations(trials);
  std::vector<bool> truncated(trials);
  std::vector<std::uint8_t> truncated_bytes(trials);
  parallel_for(trials, options.threads, [&](std::uint64_t t) {
    RngStream rng(base_seed, t);
    const TrialRecord record = run_until_optimum(bench, alg, rng, max_iters, init);
    iterations[t] = record.iterations;
    truncated_bytes[t] = record.truncated ? 1 : 0;
  });
  for (std::uint64_t t = 0; t < trials; ++t) truncated[t] = truncated_bytes[t] != 0;
  BatchStats stats = summarize(iterations, truncated, options.policy);
  stats.base_seed = base_seed;
  return stats;
}

// ---------------------------------------------------------------- level fast path

template <class S>
LevelSampler::LevelSampler(const LevelChain<S>& chain) : n_(chain.n), rows_(static_cast<std::size_t>(chain.size())) {
  for (int i = 0; i < chain.size(); ++i) {
    const std::vector<double> row = row_as_double(chain, i);
    Row& out = rows_[i];
    double acc = 0.0;
    for (int j = 0; j < chain.size(); ++j) {
      if (row[j] <= 0.0) continue;
      acc += row[j];
      out.targets.push_back(j);
      out.cumulative.push_back(acc);
    }
    // Rounding must never let a uniform draw fall past the last target.
    if (!out.cumulative.empty()) out.cumulative.back() = std::numeric_limits<double>::infinity();
  }
}

template LevelSampler::LevelSampler(const LevelChain<Rational>&);
template LevelSampler::LevelSampler(const LevelChain<Real>&);

int LevelSampler::next(int level, RngStream& rng) const {
  const Row& row = rows_[static_cast<std::size_t>(level)];
  if (row.targets.size() == 1) return row.targets.front();
  const double u = rng.uniform01();
  const auto it = std::upper_bound(row.cumulative.begin(), row.cumulative.end(), u);
  return row.targets[static_cast<std::size_t>(it - row.cumulative.begin())];
}

int LevelSampler::initial(const InitSpec& init, RngStream& rng) const {
  if (const auto* at = std::get_if<AtLevelInit>(&init)) {
    if (at->level < 0 || at->level > n_) throw DomainError("initial level outside [0, n]");
    return at->level;
  }
  int level = 0;
  for (int i = 0; i < n_; i += 64) {
    std::uint64_t word = rng();
    const int bits = std::min(64, n_ - i);
    if (bits < 64) word &= (std::uint64_t{1} << bits) - 1;
    level += std::popcount(word);
  }
  return level;
}

namespace {

LevelSampler sampler_for(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg) {
  return LevelSampler(build_level_chain<Real>(bench, alg));
}

/// Steps from `level` until `target` is reached or `max_iters` steps are spent.
std::uint64_t walk_until(const LevelSampler& sampler, int level, int target, std::uint64_t max_iters,
                         RngStream& rng) {
  std::uint64_t steps = 0;
  while (level != target && steps < max_iters) {
    level = sampler.next(level, rng);
    ++steps;
  }
  return steps;
}

}  // namespace

BatchStats run_batch_levels(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                            std::uint64_t trials, std::uint64_t max_iters, std::uint64_t base_seed,
                            const BatchOptions& options) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  const LevelSampler sampler = sampler_for(bench, alg);
  const int target = global_optimum_level(bench);
  std::vector<std::uint64_t> iterations(trials);
  std::vector<std::uint8_t> truncated_bytes(trials);
  parallel_for(trials, options.threads, [&](std::uint64_t t) {
    RngStream rng(base_seed, t);
    const int start = sampler.initial(init, rng);
    const std::uint64_t steps = walk_until(sampler, start, target, max_iters, rng);
    iterations[t] = steps;
    truncated_bytes[t] = steps >= max_iters && max_iters > 0 ? 1 : 0;
    if (truncated_bytes[t] && start == target) truncated_bytes[t] = 0;
  });
  std::vector<bool> truncated(trials);
  for (std::uint64_t t = 0; t < trials; ++t) truncated[t] = truncated_bytes[t] != 0;
  BatchStats stats = summarize(iterations, truncated, options.policy);
  stats.base_seed = base_seed;
  return stats;
}

// ---------------------------------------------------------------- phases

PhaseStats phase_experiment(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, std::uint64_t phases,
                            std::uint64_t base_seed, const PhaseOptions& options) {
  if (phases == 0) throw DomainError("phases must be at least 1");
  const std::optional<int> local = local_optimum_level(bench);
  if (!local) throw DomainError("phase experiments need a benchmark with a local optimum");
  const int optimum = global_optimum_level(bench);
  const LevelSampler sampler = sampler_for(bench, alg);

  // Integer partial sums per chunk keep the totals independent of scheduling.
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (phases + kChunk - 1) / kChunk;
  struct Partial {
    std::uint64_t length_sum = 0;
    unsigned __int128 length_squares = 0;
    std::uint64_t successes = 0;
    std::uint64_t success_length_sum = 0;
  };
  std::vector<Partial> partials(chunks);
  parallel_for(chunks, options.threads, [&](std::uint64_t c) {
    Partial& part = partials[c];
    const std::uint64_t end = std::min(phases, (c + 1) * kChunk);
    for (std::uint64_t i = c * kChunk; i < end; ++i) {
      RngStream rng(base_seed, i);
      int level = sampler.next(*local, rng);
      std::uint64_t length = 1;
      while (level != *local && level != optimum) {
        level = sampler.next(level, rng);
        ++length;
      }
      part.length_sum += length;
      part.length_squares += static_cast<unsigned __int128>(length) * length;
      if (level == optimum) {
        ++part.successes;
        part.success_length_sum += length;
      }
    }
  });
  Partial total;
  for (const Partial& p : partials) {
    total.length_sum += p.length_sum;
    total.length_squares += p.length_squares;
    total.successes += p.successes;
    total.success_length_sum += p.success_length_sum;
  }

  PhaseStats stats;
  stats.phases = phases;
  const double count = static_cast<double>(phases);
  const double mean_length = static_cast<double>(total.length_sum) / count;
  const double squares = static_cast<double>(total.length_squares);
  const double length_var = phases > 1 ? (squares - count * mean_length * mean_length) / (count - 1) : 0.0;
  stats.mean_phase_length = mean_length;
  stats.phase_length_se = std::sqrt(std::max(0.0, length_var) / count);
  stats.successes = total.successes;
  stats.success_rate = static_cast<double>(total.successes) / count;
  stats.success_rate_se = std::sqrt(stats.success_rate * (1.0 - stats.success_rate) / count);
  if (total.successes == 0) {
    stats.mean_phase_count = std::numeric_limits<double>::infinity();
    stats.wald_product = std::numeric_limits<double>::infinity();
    stats.wald_se = std::numeric_limits<double>::infinity();
  } else {
    stats.mean_phase_count = 1.0 / stats.success_rate;
    stats.wald_product = stats.mean_phase_count * stats.mean_phase_length;
    // Ratio estimator R = sum(length) / sum(success): Var ~ sum((y - R x)^2) / (N xbar)^2.
    const double r = stats.wald_product;
    const double residual = squares - 2.0 * r * static_cast<double>(total.success_length_sum) +
                            r * r * static_cast<double>(total.successes);
    stats.wald_se = std::sqrt(std::max(0.0, residual)) / static_cast<double>(total.successes);
  }

  if (options.t2_trials > 0) {
    std::vector<std::uint64_t> t2(options.t2_trials);
    std::vector<std::uint8_t> truncated_bytes(options.t2_trials);
    parallel_for(options.t2_trials, options.threads, [&](std::uint64_t k) {
      RngStream rng(base_seed, (std::uint64_t{1} << 63) + k);
      t2[k] = walk_until(sampler, *local, optimum, options.t2_max_iters, rng);
      truncated_bytes[k] = t2[k] >= options.t2_max_iters ? 1 : 0;
    });
    std::vector<bool> truncated(options.t2_trials);
    for (std::uint64_t k = 0; k < options.t2_trials; ++k) truncated[k] = truncated_bytes[k] != 0;
    const BatchStats t2_stats = summarize(t2, truncated, TruncationPolicy::Fail);
    stats.t2_trials = options.t2_trials;
    stats.mean_T2 = t2_stats.mean;
    stats.t2_se = t2_stats.std_error;
    stats.t2_truncated = t2_stats.truncation_count;
  }
  return stats;
}

// ---------------------------------------------------------------- fitting

SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("loglog_slope needs at least 3 points");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [n, value] : points) {
    if (!(n > 0) || !(value > 0) || !std::isfinite(value) || !std::isfinite(n)) {
      throw DomainError("loglog_slope needs positive finite points");
    }
    xs.push_back(std::log(n));
    ys.push_back(std::log(value));
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DomainError("loglog_slope needs at least two distinct n");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace mahh
