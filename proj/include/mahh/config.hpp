#pragma once

#include "mahh/benchmarks.hpp"
#include "mahh/heuristics.hpp"
#include "mahh/runner.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mahh {

enum class Mode { Exact, Simulate, Bounds, Scaling, Phases, Compare };
enum class OutputFormat { Csv, Json };
/// Bits runs the bit-string heuristics; Levels samples the level chain.
enum class Engine { Bits, Levels };
/// Where the per-n values of a scaling study come from.
enum class ScalingSource { Exact, Simulate };

/// Schema violations. The message always names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  Mode mode = Mode::Exact;
  BenchmarkSpec benchmark;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<int> n_grid;   // ascending; defaults to the benchmark's own n
  InitSpec init = UniformRandomInit{};
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> max_iters;  // unset: derived per cell
  std::uint64_t seed = 0;
  std::string output;        // empty or "-": standard output
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t phases = 100000;
  std::uint64_t t2_trials = 0;
  Engine engine = Engine::Bits;
  ScalingSource scaling_source = ScalingSource::Exact;
  TruncationPolicy truncation = TruncationPolicy::Fail;
  std::optional<Backend> backend;
  unsigned threads = 0;

  /// The benchmark at grid dimension n.
  BenchmarkSpec benchmark_at(int n) const { return benchmark.with_dimension(n); }
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Parses a JSON object. Keys: mode, benchmark, algorithm (string or list),
/// n_grid, init, trials, max_iters, seed, output, format, phases, t2_trials,
/// engine, scaling_source, truncation, backend, threads.
ExperimentConfig parse_config(std::string_view text);

}  // namespace mahh
