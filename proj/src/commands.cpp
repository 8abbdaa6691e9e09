#include "mahh/commands.hpp"

#include "mahh/chain.hpp"
#include "mahh/theory.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

namespace mahh {

using nlohmann::ordered_json;

namespace {

struct Cell {
  std::string text;
  ordered_json value;
};

Cell cell(const std::string& s) { return {s, s}; }
Cell cell(std::string_view s) { return cell(std::string(s)); }
Cell cell(const char* s) { return cell(std::string(s)); }
Cell cell(std::int64_t v) { return {std::to_string(v), v}; }
Cell cell(int v) { return cell(static_cast<std::int64_t>(v)); }
Cell cell(std::uint64_t v) { return {std::to_string(v), v}; }

Cell cell(double v, int digits = 12) {
  if (std::isinf(v)) return {v > 0 ? "inf" : "-inf", v > 0 ? "inf" : "-inf"};
  if (std::isnan(v)) return {"nan", "nan"};
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return {os.str(), v};
}

Cell cell(const ExactValue& v) {
  if (v.is_infinite()) return {"inf", "inf"};
  const std::string text = v.to_string(false, 17);
  return {text, v.to_double()};
}

Cell empty_cell() { return {"", nullptr}; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_table(std::ostream& os, const Table& table, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i].text);
      os << '\n';
    }
    return;
  }
  ordered_json doc = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i].value;
    doc.push_back(std::move(obj));
  }
  os << doc.dump(2) << '\n';
}

Cell p_cell(const ResolvedAlgorithm& alg) {
  if (alg.kind == AlgorithmKind::MAHH || alg.kind == AlgorithmKind::MAHHGlobal) return cell(alg.p_double, 15);
  return empty_cell();
}

/// The four leading identification columns plus p.
std::vector<Cell> id_cells(const AlgorithmSpec& spec, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg) {
  return {cell(to_string(spec)), cell(kind_name(bench.kind)), cell(bench.n), cell(bench.param), p_cell(alg)};
}

const std::vector<std::string> kIdColumns = {"algorithm", "benchmark", "n", "param", "p"};

std::vector<std::string> with_id(std::initializer_list<std::string> extra) {
  std::vector<std::string> cols = kIdColumns;
  cols.insert(cols.end(), extra);
  return cols;
}

ExactOptions exact_options(const ExperimentConfig& cfg) {
  ExactOptions o;
  o.backend = cfg.backend;
  return o;
}

BatchStats simulate_cell(const ExperimentConfig& cfg, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg) {
  const std::uint64_t max_iters = cfg.max_iters ? *cfg.max_iters : default_max_iters(bench, alg, cfg.init);
  BatchOptions options{cfg.truncation, cfg.threads};
  return cfg.engine == Engine::Levels ? run_batch_levels(bench, alg, cfg.init, cfg.trials, max_iters, cfg.seed, options)
                                      : run_batch(bench, alg, cfg.init, cfg.trials, max_iters, cfg.seed, options);
}

int run_exact(const ExperimentConfig& cfg, Table& table, bool compare) {
  table.columns = with_id({"backend", "expected_runtime"});
  if (compare) table.columns.push_back("ratio_to_first");
  for (int n : cfg.n_grid) {
    const BenchmarkSpec bench = cfg.benchmark_at(n);
    std::optional<ExactValue> first;
    for (const AlgorithmSpec& spec : cfg.algorithms) {
      const ResolvedAlgorithm alg = resolve(spec, bench);
      const ExactValue value = expected_runtime_exact(bench, alg, cfg.init, exact_options(cfg));
      auto row = id_cells(spec, bench, alg);
      row.push_back(cell(to_string(value.backend())));
      row.push_back(cell(value));
      if (compare) {
        if (!first) first = value;
        if (value.is_infinite() || first->is_infinite()) {
          row.push_back(value.is_infinite() && !first->is_infinite() ? cell("inf") : cell("nan"));
        } else {
          row.push_back(cell(static_cast<double>(value.real() / first->real())));
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return kExitOk;
}

int run_simulate(const ExperimentConfig& cfg, Table& table) {
  table.columns = with_id({"trials", "mean", "stderr", "truncated"});
  int status = kExitOk;
  for (int n : cfg.n_grid) {
    const BenchmarkSpec bench = cfg.benchmark_at(n);
    for (const AlgorithmSpec& spec : cfg.algorithms) {
      const ResolvedAlgorithm alg = resolve(spec, bench);
      const BatchStats stats = simulate_cell(cfg, bench, alg);
      if (stats.failed()) status = kExitTruncated;
      auto row = id_cells(spec, bench, alg);
      row.push_back(cell(stats.trials));
      row.push_back(cell(stats.mean));
      row.push_back(cell(stats.std_error));
      row.push_back(cell(stats.truncation_count));
      table.rows.push_back(std::move(row));
    }
  }
  return status;
}

int run_bounds(const ExperimentConfig& cfg, Table& table) {
  table.columns = {"bound_name", "n", "m", "p", "value", "exact", "satisfied", "ratio"};
  std::vector<ParamExpr> ps;
  for (const AlgorithmSpec& spec : cfg.algorithms) ps.push_back(*spec.p);
  if (ps.empty()) ps.push_back(ParamExpr::m_over_n());
  for (int n : cfg.n_grid) {
    for (const ParamExpr& p : ps) {
      for (const BoundReport& r : jump_bound_reports(n, cfg.benchmark.param, p)) {
        table.rows.push_back({cell(r.name), cell(r.n), cell(r.m), cell(r.p), cell(r.value), cell(r.compared_to),
                              r.satisfied ? cell(*r.satisfied ? "true" : "false") : cell("na"), cell(r.ratio, 10)});
      }
    }
  }
  return kExitOk;
}

int run_scaling(const ExperimentConfig& cfg, Table& table, std::ostream& err) {
  table.columns = with_id({"value", "stderr", "slope", "intercept", "r2"});
  int status = kExitOk;
  for (const AlgorithmSpec& spec : cfg.algorithms) {
    std::vector<std::pair<double, double>> points;
    std::vector<std::vector<Cell>> rows;
    for (int n : cfg.n_grid) {
      const BenchmarkSpec bench = cfg.benchmark_at(n);
      const ResolvedAlgorithm alg = resolve(spec, bench);
      auto row = id_cells(spec, bench, alg);
      if (cfg.scaling_source == ScalingSource::Exact) {
        const ExactValue value = expected_runtime_exact(bench, alg, cfg.init, exact_options(cfg));
        row.push_back(cell(value));
        row.push_back(cell(0.0));
        points.emplace_back(n, value.to_double());
      } else {
        const BatchStats stats = simulate_cell(cfg, bench, alg);
        if (stats.failed()) status = kExitTruncated;
        row.push_back(cell(stats.mean));
        row.push_back(cell(stats.std_error));
        points.emplace_back(n, stats.mean);
      }
      rows.push_back(std::move(row));
    }
    SlopeFit fit;
    bool fitted = true;
    try {
      fit = loglog_slope(points);
    } catch (const DomainError& e) {
      err << "scaling fit for " << to_string(spec) << " failed: " << e.what() << '\n';
      fitted = false;
      status = kExitFailure;
    }
    for (auto& row : rows) {
      if (fitted) {
        row.push_back(cell(fit.slope, 10));
        row.push_back(cell(fit.intercept, 10));
        row.push_back(cell(fit.r2, 10));
      } else {
        row.push_back(cell("nan"));
        row.push_back(cell("nan"));
        row.push_back(cell("nan"));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return status;
}

int run_phases(const ExperimentConfig& cfg, Table& table) {
  table.columns = with_id({"trials", "mean", "stderr", "truncated", "phase_len_mean", "phase_success", "est_N",
                           "wald_product", "t2_mean"});
  int status = kExitOk;
  for (int n : cfg.n_grid) {
    const BenchmarkSpec bench = cfg.benchmark_at(n);
    for (const AlgorithmSpec& spec : cfg.algorithms) {
      const ResolvedAlgorithm alg = resolve(spec, bench);
      PhaseOptions options;
      options.t2_trials = cfg.t2_trials;
      if (cfg.max_iters) options.t2_max_iters = *cfg.max_iters;
      options.threads = cfg.threads;
      const PhaseStats stats = phase_experiment(bench, alg, cfg.phases, cfg.seed, options);
      if (stats.t2_truncated > 0 && cfg.truncation == TruncationPolicy::Fail) status = kExitTruncated;
      auto row = id_cells(spec, bench, alg);
      row.push_back(cell(stats.phases));
      row.push_back(cell(stats.wald_product));
      row.push_back(cell(stats.wald_se));
      row.push_back(cell(stats.t2_truncated));
      row.push_back(cell(stats.mean_phase_length));
      row.push_back(cell(stats.success_rate));
      row.push_back(cell(stats.mean_phase_count));
      row.push_back(cell(stats.wald_product));
      row.push_back(stats.t2_trials > 0 ? cell(stats.mean_T2) : empty_cell());
      table.rows.push_back(std::move(row));
    }
  }
  return status;
}

}  // namespace

std::uint64_t default_max_iters(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const InitSpec& init) {
  constexpr std::uint64_t kNoEstimate = 1'000'000'000;
  const bool cheap = alg.one_bit() ? bench.n <= 512 : bench.n <= 64;
  if (!cheap) return kNoEstimate;
  const ExactValue exact = expected_runtime_exact(bench, alg, init);
  if (exact.is_infinite()) return 1'000'000;
  const double scaled = std::ceil(100.0 * exact.to_double());
  if (scaled >= 1e15) return static_cast<std::uint64_t>(1e15);
  return std::max<std::uint64_t>(1000, static_cast<std::uint64_t>(scaled));
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  Table table;
  int status = kExitOk;
  try {
    switch (config.mode) {
      case Mode::Exact: status = run_exact(config, table, false); break;
      case Mode::Compare: status = run_exact(config, table, true); break;
      case Mode::Simulate: status = run_simulate(config, table); break;
      case Mode::Bounds: status = run_bounds(config, table); break;
      case Mode::Scaling: status = run_scaling(config, table, err); break;
      case Mode::Phases: status = run_phases(config, table); break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  write_table(out, table, config.format);
  if (!out) {
    err << "error: failed to write output\n";
    return kExitFailure;
  }
  if (status == kExitTruncated) err << "warning: truncated trials under the fail policy\n";
  return status;
}

int cmd_run(const ExperimentConfig& config, std::ostream& err) {
  if (config.output.empty() || config.output == "-") return cmd_run(config, std::cout, err);
  std::ofstream file(config.output, std::ios::binary);
  if (!file) {
    err << "error: cannot open " << config.output << " for writing\n";
    return kExitFailure;
  }
  return cmd_run(config, file, err);
}

}  // namespace mahh
