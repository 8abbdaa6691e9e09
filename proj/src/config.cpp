#include "mahh/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace mahh {

using nlohmann::json;

ConfigError::ConfigError(const std::string& key, const std::string& what)
    : std::invalid_argument("config key '" + key + "': " + what), key_(key) {}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Exact: return "exact";
    case Mode::Simulate: return "simulate";
    case Mode::Bounds: return "bounds";
    case Mode::Scaling: return "scaling";
    case Mode::Phases: return "phases";
    case Mode::Compare: return "compare";
  }
  return "exact";
}

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::string& as_string(const json& value, const std::string& key) {
  if (!value.is_string()) throw ConfigError(key, "expected a string");
  return value.get_ref<const std::string&>();
}

std::uint64_t as_count(const json& value, const std::string& key, std::uint64_t minimum) {
  std::uint64_t out = 0;
  if (value.is_number_unsigned()) {
    out = value.get<std::uint64_t>();
  } else if (value.is_number_integer()) {
    if (value.get<std::int64_t>() < 0) throw ConfigError(key, "must be nonnegative");
    out = static_cast<std::uint64_t>(value.get<std::int64_t>());
  } else if (value.is_number_float()) {
    // Allows 1e6-style literals as long as they are whole numbers.
    const double d = value.get<double>();
    if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
      throw ConfigError(key, "must be a nonnegative integer");
    }
    out = static_cast<std::uint64_t>(d);
  } else {
    throw ConfigError(key, "expected an integer");
  }
  if (out < minimum) throw ConfigError(key, "must be at least " + std::to_string(minimum));
  return out;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

Mode parse_mode(std::string_view text) {
  const std::string t = lower(text);
  for (Mode m : {Mode::Exact, Mode::Simulate, Mode::Bounds, Mode::Scaling, Mode::Phases, Mode::Compare}) {
    if (t == to_string(m)) return m;
  }
  throw ConfigError("mode", "unknown mode '" + std::string(text) +
                                "' (expected exact, simulate, bounds, scaling, phases or compare)");
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "expected a JSON object");

  static const std::set<std::string> known = {
      "mode",   "benchmark", "algorithm", "algorithms", "n_grid", "init",           "trials",     "max_iters",
      "seed",   "output",    "format",    "phases",     "t2_trials", "engine",       "scaling_source", "truncation",
      "backend", "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError(key, "unknown key");
  }

  ExperimentConfig cfg;
  if (!doc.contains("mode")) throw ConfigError("mode", "required");
  cfg.mode = parse_mode(as_string(doc["mode"], "mode"));

  if (!doc.contains("benchmark")) throw ConfigError("benchmark", "required");
  cfg.benchmark = wrap("benchmark", [&] { return parse_benchmark(as_string(doc["benchmark"], "benchmark")); });

  const bool has_single = doc.contains("algorithm");
  const bool has_list = doc.contains("algorithms");
  if (has_single && has_list) throw ConfigError("algorithms", "give either 'algorithm' or 'algorithms'");
  const std::string alg_key = has_list ? "algorithms" : "algorithm";
  if (has_single || has_list) {
    const json& algs = doc[alg_key];
    if (algs.is_string()) {
      cfg.algorithms.push_back(wrap(alg_key, [&] { return parse_algorithm(algs.get<std::string>()); }));
    } else if (algs.is_array() && !algs.empty()) {
      for (const json& a : algs) {
        cfg.algorithms.push_back(wrap(alg_key, [&] { return parse_algorithm(as_string(a, alg_key)); }));
      }
    } else {
      throw ConfigError(alg_key, "expected a spec string or a nonempty list of spec strings");
    }
  } else if (cfg.mode != Mode::Bounds) {
    throw ConfigError("algorithm", "required");
  }

  if (doc.contains("n_grid")) {
    const json& grid = doc["n_grid"];
    if (!grid.is_array() || grid.empty()) throw ConfigError("n_grid", "expected a nonempty list of integers");
    for (const json& v : grid) {
      const std::uint64_t n = as_count(v, "n_grid", 1);
      if (n > 100000) throw ConfigError("n_grid", "dimension too large");
      cfg.n_grid.push_back(static_cast<int>(n));
    }
    if (!std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()) ||
        std::adjacent_find(cfg.n_grid.begin(), cfg.n_grid.end()) != cfg.n_grid.end()) {
      throw ConfigError("n_grid", "must be strictly ascending");
    }
  } else {
    cfg.n_grid = {cfg.benchmark.n};
  }

  if (doc.contains("init")) cfg.init = wrap("init", [&] { return parse_init(as_string(doc["init"], "init")); });
  if (doc.contains("trials")) cfg.trials = as_count(doc["trials"], "trials", 1);
  if (doc.contains("max_iters")) cfg.max_iters = as_count(doc["max_iters"], "max_iters", 1);
  if (doc.contains("seed")) cfg.seed = as_count(doc["seed"], "seed", 0);
  if (doc.contains("output")) cfg.output = as_string(doc["output"], "output");
  if (doc.contains("format")) {
    const std::string f = lower(as_string(doc["format"], "format"));
    if (f == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (f == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw ConfigError("format", "expected csv or json, got '" + f + "'");
    }
  }
  if (doc.contains("phases")) cfg.phases = as_count(doc["phases"], "phases", 1);
  if (doc.contains("t2_trials")) cfg.t2_trials = as_count(doc["t2_trials"], "t2_trials", 0);
  if (doc.contains("engine")) {
    const std::string e = lower(as_string(doc["engine"], "engine"));
    if (e == "bits") {
      cfg.engine = Engine::Bits;
    } else if (e == "levels") {
      cfg.engine = Engine::Levels;
    } else {
      throw ConfigError("engine", "expected bits or levels, got '" + e + "'");
    }
  }
  if (doc.contains("scaling_source")) {
    const std::string s = lower(as_string(doc["scaling_source"], "scaling_source"));
    if (s == "exact") {
      cfg.scaling_source = ScalingSource::Exact;
    } else if (s == "simulate") {
      cfg.scaling_source = ScalingSource::Simulate;
    } else {
      throw ConfigError("scaling_source", "expected exact or simulate, got '" + s + "'");
    }
  }
  if (doc.contains("truncation")) {
    const std::string t = lower(as_string(doc["truncation"], "truncation"));
    if (t == "fail") {
      cfg.truncation = TruncationPolicy::Fail;
    } else if (t == "exclude") {
      cfg.truncation = TruncationPolicy::Exclude;
    } else {
      throw ConfigError("truncation", "expected fail or exclude, got '" + t + "'");
    }
  }
  if (doc.contains("backend")) {
    const std::string b = lower(as_string(doc["backend"], "backend"));
    if (b == "rational") {
      cfg.backend = Backend::Rational;
    } else if (b == "logfloat") {
      cfg.backend = Backend::LogFloat;
    } else if (b != "auto") {
      throw ConfigError("backend", "expected auto, rational or logfloat, got '" + b + "'");
    }
  }
  if (doc.contains("threads")) cfg.threads = static_cast<unsigned>(as_count(doc["threads"], "threads", 0));

  // Every spec must make sense at every grid point.
  for (int n : cfg.n_grid) {
    const BenchmarkSpec bench = wrap("n_grid", [&] { return cfg.benchmark_at(n); });
    for (const AlgorithmSpec& alg : cfg.algorithms) {
      wrap(alg_key, [&] { return resolve(alg, bench); });
    }
    if (const auto* at = std::get_if<AtLevelInit>(&cfg.init); at && at->level > n) {
      throw ConfigError("init", "level " + std::to_string(at->level) + " exceeds n=" + std::to_string(n));
    }
  }

  switch (cfg.mode) {
    case Mode::Scaling:
      if (cfg.n_grid.size() < 3) throw ConfigError("n_grid", "scaling needs at least 3 grid points for the slope fit");
      break;
    case Mode::Bounds:
      if (cfg.benchmark.kind != BenchmarkKind::Jump) throw ConfigError("benchmark", "bounds need a jump benchmark");
      for (const AlgorithmSpec& alg : cfg.algorithms) {
        if (alg.kind != AlgorithmKind::MAHH) throw ConfigError(alg_key, "bounds take a mahh algorithm for p");
      }
      break;
    case Mode::Phases:
      if (cfg.benchmark.kind == BenchmarkKind::OneMax) {
        throw ConfigError("benchmark", "phases need a benchmark with a local optimum");
      }
      break;
    default:
      break;
  }
  return cfg;
}

}  // namespace mahh
