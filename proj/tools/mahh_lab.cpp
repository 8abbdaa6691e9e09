// mahh_lab: exact runtimes, bound reports and simulations for the MAHH family.

#include "mahh/commands.hpp"
#include "mahh/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct InlineFlags {
  std::string config_path;
  std::string benchmark;
  std::vector<std::string> algorithms;
  std::vector<int> n_grid;
  std::string init;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> max_iters;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format;
  std::optional<std::uint64_t> phases;
  std::optional<std::uint64_t> t2_trials;
  std::string engine;
  std::string scaling_source;
  std::string truncation;
  std::string backend;
  std::optional<unsigned> threads;
};

void add_flags(CLI::App* cmd, InlineFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment file; inline flags override its keys");
  cmd->add_option("--benchmark,-b", f.benchmark, "onemax:n=<n> | cliff:n=<n>,d=<d> | jump:n=<n>,m=<m>");
  cmd->add_option("--algorithm,-a", f.algorithms, "algorithm spec; repeat for several")->take_all();
  cmd->add_option("--n-grid,-n", f.n_grid, "dimensions, e.g. 64,128,256")->delimiter(',');
  cmd->add_option("--init", f.init, "uniform | level:<k>");
  cmd->add_option("--trials", f.trials, "independent runs per cell (default 1000)");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap per run (default: derived per cell)");
  cmd->add_option("--seed", f.seed, "master seed (default 0)");
  cmd->add_option("--output,-o", f.output, "output file (default: standard output)");
  cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--phases", f.phases, "phases sampled in phases mode (default 100000)");
  cmd->add_option("--t2-trials", f.t2_trials, "direct runs from the local optimum (default 0)");
  cmd->add_option("--engine", f.engine, "bits | levels")->check(CLI::IsMember({"bits", "levels"}));
  cmd->add_option("--scaling-source", f.scaling_source, "exact | simulate");
  cmd->add_option("--truncation", f.truncation, "fail | exclude");
  cmd->add_option("--backend", f.backend, "auto | rational | logfloat");
  cmd->add_option("--threads", f.threads, "worker threads (default: MAHH_THREADS or all cores)");
}

nlohmann::json merge(const std::string& mode, const InlineFlags& f) {
  nlohmann::json doc = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot read config file " + f.config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    doc = nlohmann::json::parse(buffer.str());
    if (!doc.is_object()) throw std::runtime_error(f.config_path + ": expected a JSON object");
  }
  doc["mode"] = mode;
  if (!f.benchmark.empty()) doc["benchmark"] = f.benchmark;
  if (!f.algorithms.empty()) {
    doc.erase("algorithm");
    doc["algorithms"] = f.algorithms;
  }
  if (!f.n_grid.empty()) doc["n_grid"] = f.n_grid;
  if (!f.init.empty()) doc["init"] = f.init;
  if (f.trials) doc["trials"] = *f.trials;
  if (f.max_iters) doc["max_iters"] = *f.max_iters;
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.output.empty()) doc["output"] = f.output;
  if (!f.format.empty()) doc["format"] = f.format;
  if (f.phases) doc["phases"] = *f.phases;
  if (f.t2_trials) doc["t2_trials"] = *f.t2_trials;
  if (!f.engine.empty()) doc["engine"] = f.engine;
  if (!f.scaling_source.empty()) doc["scaling_source"] = f.scaling_source;
  if (!f.truncation.empty()) doc["truncation"] = f.truncation;
  if (!f.backend.empty()) doc["backend"] = f.backend;
  if (f.threads) doc["threads"] = *f.threads;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and simulated runtimes of move-acceptance hyper-heuristics"};
  app.require_subcommand(1);
  InlineFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"exact", "exact expected runtime per grid point"},
      {"simulate", "Monte Carlo batch statistics"},
      {"bounds", "bound reports against exact values (jump only)"},
      {"scaling", "per-n values and a log-log slope fit"},
      {"phases", "phase decomposition around the local optimum"},
      {"compare", "exact runtimes of several algorithms side by side"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  CLI11_PARSE(app, argc, argv);
  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    const mahh::ExperimentConfig cfg = mahh::parse_config(merge(mode, flags).dump());
    return mahh::cmd_run(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
