#pragma once

#include "mahh/chain.hpp"
#include "mahh/heuristics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mahh {

enum class TruncationPolicy {
  Fail,     // any truncated trial fails the batch; stats include truncated runs at max_iters
  Exclude,  // truncated trials are left out of mean and variance
};

struct BatchStats {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
  std::uint64_t truncation_count = 0;
  std::uint64_t base_seed = 0;
  TruncationPolicy policy = TruncationPolicy::Fail;

  bool failed() const { return policy == TruncationPolicy::Fail && truncation_count > 0; }
};

struct BatchOptions {
  TruncationPolicy policy = TruncationPolicy::Fail;
  unsigned threads = 0;  // 0: MAHH_THREADS or hardware concurrency
};

/// Worker threads for batch runs: the MAHH_THREADS environment variable if
/// set, else the hardware concurrency.
unsigned default_thread_count();

/// Mean/variance of the samples in index order (deterministic for a given vector).
BatchStats summarize(const std::vector<std::uint64_t>& iterations, const std::vector<bool>& truncated,
                     TruncationPolicy policy);

/// run_until_optimum on streams (base_seed, 0..trials-1).
BatchStats run_batch(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                     std::uint64_t trials, std::uint64_t max_iters, std::uint64_t base_seed,
                     const BatchOptions& options = {});

/// Samples level transitions directly from chain rows.
class LevelSampler {
 public:
  template <class S>
  explicit LevelSampler(const LevelChain<S>& chain);

  int n() const { return n_; }
  int next(int level, RngStream& rng) const;
  /// Uniform random string's level (Binomial(n, 1/2)) or the fixed level.
  int initial(const InitSpec& init, RngStream& rng) const;

 private:
  struct Row {
    std::vector<int> targets;
    std::vector<double> cumulative;
  };
  int n_ = 0;
  std::vector<Row> rows_;
};

/// Level-space counterpart of run_batch: same law of the runtime, not the same paths.
BatchStats run_batch_levels(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init,
                            std::uint64_t trials, std::uint64_t max_iters, std::uint64_t base_seed,
                            const BatchOptions& options = {});

struct PhaseStats {
  std::uint64_t phases = 0;
  double mean_phase_length = 0.0;
  double phase_length_se = 0.0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double success_rate_se = 0.0;
  double mean_phase_count = 0.0;  // geometric MLE 1 / success_rate
  double wald_product = 0.0;      // mean_phase_count * mean_phase_length
  double wald_se = 0.0;           // delta method
  std::uint64_t t2_trials = 0;
  double mean_T2 = 0.0;           // direct runs from the local optimum, independent streams
  double t2_se = 0.0;
  std::uint64_t t2_truncated = 0;
};

struct PhaseOptions {
  std::uint64_t t2_trials = 0;
  std::uint64_t t2_max_iters = 1'000'000'000;
  unsigned threads = 0;
};

/// Phases start on the local optimum and end at the next iteration at which
/// the state is again on the local optimum or on the global optimum.
/// Phase i uses stream (base_seed, i); direct T2 run k uses (base_seed, 2^63 + k).
PhaseStats phase_experiment(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, std::uint64_t phases,
                            std::uint64_t base_seed, const PhaseOptions& options = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares fit of ln(value) against ln(n).
SlopeFit loglog_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace mahh
