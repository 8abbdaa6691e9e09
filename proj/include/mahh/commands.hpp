#pragma once

#include "mahh/config.hpp"

#include <cstdint>
#include <iosfwd>

namespace mahh {

/// Exit statuses of cmd_run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // solver or I/O failure
inline constexpr int kExitTruncated = 2;   // a batch hit max_iters under the fail policy

/// Executes one experiment and writes its table to `out` (CSV or JSON).
/// Diagnostics go to `err`. Infinite exact results are rows, not failures.
int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// As above, writing to config.output (standard output when empty or "-").
int cmd_run(const ExperimentConfig& config, std::ostream& err);

/// max_iters used when the config leaves it unset: 100 x the exact
/// expectation when it is cheap to compute, 10^6 when that expectation is
/// infinite, otherwise 10^9.
std::uint64_t default_max_iters(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init);

}  // namespace mahh
