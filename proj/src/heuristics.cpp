#include "mahh/heuristics.hpp"

#include "spec_parsing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mahh {

// ---------------------------------------------------------------- parameters

ParamExpr ParamExpr::constant(const Rational& c) { return ParamExpr(Form::Constant, c); }

ParamExpr ParamExpr::inv_one_plus_eps_n(const Rational& eps) {
  if (eps <= 0) throw DomainError("eps must be positive");
  return ParamExpr(Form::InvOnePlusEpsN, eps);
}

ParamExpr ParamExpr::parse(std::string_view text, std::optional<Rational> eps) {
  std::string compact;
  for (char c : text) {
    if (c != ' ' && c != '*') compact.push_back(c);
  }
  if (compact == "m/n") return m_over_n();
  if (compact == "m/(8en)" || compact == "m/(8*e*n)") return m_over_eight_e_n();
  if (compact == "1/((1+eps)n)") {
    if (!eps) throw DomainError("p=1/((1+eps)n) requires eps=<value>");
    return inv_one_plus_eps_n(*eps);
  }
  if (eps) throw DomainError("eps is only meaningful with p=1/((1+eps)n)");
  if (compact.find_first_of("mne") != std::string::npos && compact.find_first_of("mn") != std::string::npos) {
    throw DomainError("unsupported parameter expression '" + std::string(text) +
                      "' (use a number, m/n, m/(8en) or 1/((1+eps)n))");
  }
  return constant(parse_rational(compact));
}

ParamValue ParamExpr::resolve(const BenchmarkSpec& bench) const {
  auto need_m = [&]() {
    if (bench.kind == BenchmarkKind::OneMax) {
      throw DomainError("parameter " + to_string() + " needs a benchmark with a jump size or cliff width");
    }
    return bench.param;
  };
  const int n = bench.n;
  switch (form_) {
    case Form::Constant:
      return ParamValue::from_rational(value_);
    case Form::MOverN:
      return ParamValue::from_rational(Rational(need_m(), n));
    case Form::MOverEightEN:
      return ParamValue::from_real(Real(need_m()) / (Real(8) * real_e() * Real(n)));
    case Form::InvOnePlusEpsN:
      return ParamValue::from_rational(Rational(1) / ((Rational(1) + value_) * n));
  }
  throw ContractViolation("unknown parameter form");
}

namespace {

/// Terminating decimals print as decimals (0.1), anything else as num/den.
std::string exact_decimal(const Rational& q) {
  Integer den = mp::denominator(q);
  int digits = 0;
  Integer rest = den;
  while (rest % 10 == 0) rest /= 10, ++digits;
  while (rest % 2 == 0) rest /= 2, ++digits;
  while (rest % 5 == 0) rest /= 5, ++digits;
  if (rest != 1) return mp::numerator(q).str() + "/" + den.str();
  if (digits == 0) return mp::numerator(q).str();
  Integer scaled = mp::numerator(q * integer_power(Rational(10), digits));
  const bool negative = scaled < 0;
  std::string text = Integer(mp::abs(scaled)).str();
  if (static_cast<int>(text.size()) <= digits) text.insert(0, digits - text.size() + 1, '0');
  text.insert(text.size() - digits, ".");
  while (text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  return (negative ? "-" : "") + text;
}

}  // namespace

std::string ParamExpr::to_string() const {
  switch (form_) {
    case Form::Constant:
      return exact_decimal(value_);
    case Form::MOverN:
      return "m/n";
    case Form::MOverEightEN:
      return "m/(8en)";
    case Form::InvOnePlusEpsN:
      return "1/((1+eps)n),eps=" + ExactValue(value_).to_string(true);
  }
  return "?";
}

// ---------------------------------------------------------------- algorithm specs

AlgorithmSpec AlgorithmSpec::mahh(ParamExpr p, Acceptance acc) {
  AlgorithmSpec a{AlgorithmKind::MAHH, std::move(p), std::nullopt, acc};
  a.validate();
  return a;
}

AlgorithmSpec AlgorithmSpec::mahh_global(ParamExpr p, Acceptance acc) {
  AlgorithmSpec a{AlgorithmKind::MAHHGlobal, std::move(p), std::nullopt, acc};
  a.validate();
  return a;
}

AlgorithmSpec AlgorithmSpec::metropolis(const Rational& alpha) {
  AlgorithmSpec a{AlgorithmKind::Metropolis, std::nullopt, alpha, Acceptance::OnlyImproving};
  a.validate();
  return a;
}

AlgorithmSpec AlgorithmSpec::one_plus_one_ea() {
  return AlgorithmSpec{AlgorithmKind::OnePlusOneEA, std::nullopt, std::nullopt, Acceptance::OnlyImproving};
}

void AlgorithmSpec::validate() const {
  const bool mahh_family = kind == AlgorithmKind::MAHH || kind == AlgorithmKind::MAHHGlobal;
  if (mahh_family) {
    if (!p) throw DomainError(std::string(kind_name(kind)) + " requires p");
    if (metropolis_alpha) throw DomainError(std::string(kind_name(kind)) + " does not take alpha");
    if (p->form() == ParamExpr::Form::Constant) {
      const Rational& c = p->value();
      if (c < 0 || c > 1) throw DomainError("p must lie in [0,1], got " + p->to_string());
    }
  } else if (kind == AlgorithmKind::Metropolis) {
    if (p) throw DomainError("metropolis does not take p");
    if (!metropolis_alpha) throw DomainError("metropolis requires alpha");
    if (*metropolis_alpha <= 1) throw DomainError("alpha must be greater than 1");
  } else {
    if (p || metropolis_alpha) throw DomainError("ea takes no parameters");
  }
}

ResolvedAlgorithm resolve(const AlgorithmSpec& alg, const BenchmarkSpec& bench) {
  alg.validate();
  bench.validate();
  ResolvedAlgorithm r;
  r.kind = alg.kind;
  r.acceptance = alg.acceptance;
  if (alg.p) {
    r.p = alg.p->resolve(bench);
    if (r.p.approx < 0 || r.p.approx > 1) {
      throw DomainError("p must lie in [0,1], got " + r.p.approx.str(10) + " for " + to_string(bench));
    }
    r.p_double = r.p.to_double();
  }
  if (alg.metropolis_alpha) {
    r.alpha = ParamValue::from_rational(*alg.metropolis_alpha);
    r.alpha_double = r.alpha.to_double();
  }
  return r;
}

std::string_view kind_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::MAHH:
      return "mahh";
    case AlgorithmKind::Metropolis:
      return "metropolis";
    case AlgorithmKind::OnePlusOneEA:
      return "ea";
    case AlgorithmKind::MAHHGlobal:
      return "mahh-global";
  }
  return "?";
}

AlgorithmSpec parse_algorithm(std::string_view text) {
  const detail::SpecString parsed = detail::split_spec(text);
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = parsed.params.find(key);
    if (it == parsed.params.end()) return std::nullopt;
    return it->second;
  };
  auto reject_unknown = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : parsed.params) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw DomainError("unknown parameter '" + key + "' for algorithm '" + parsed.name + "'");
      }
    }
  };

  if (parsed.name == "mahh" || parsed.name == "mahh-global") {
    reject_unknown({"p", "acc", "eps"});
    const auto p = get("p");
    if (!p) throw DomainError("algorithm '" + std::string(text) + "' is missing 'p='");
    std::optional<Rational> eps;
    if (auto e = get("eps")) eps = parse_rational(*e);
    Acceptance acc = Acceptance::OnlyImproving;
    if (auto a = get("acc")) {
      if (*a == "oi") {
        acc = Acceptance::OnlyImproving;
      } else if (*a == "ie") {
        acc = Acceptance::ImprovingAndEqual;
      } else {
        throw DomainError("acc must be 'oi' or 'ie', got '" + *a + "'");
      }
    }
    const ParamExpr expr = ParamExpr::parse(*p, eps);
    return parsed.name == "mahh" ? AlgorithmSpec::mahh(expr, acc) : AlgorithmSpec::mahh_global(expr, acc);
  }
  if (parsed.name == "metropolis") {
    reject_unknown({"alpha"});
    const auto alpha = get("alpha");
    if (!alpha) throw DomainError("metropolis is missing 'alpha='");
    return AlgorithmSpec::metropolis(parse_rational(*alpha));
  }
  if (parsed.name == "ea") {
    reject_unknown({});
    return AlgorithmSpec::one_plus_one_ea();
  }
  throw DomainError("unknown algorithm '" + parsed.name + "' (expected mahh, metropolis, ea or mahh-global)");
}

std::string to_string(const AlgorithmSpec& alg) {
  std::string out(kind_name(alg.kind));
  switch (alg.kind) {
    case AlgorithmKind::MAHH:
    case AlgorithmKind::MAHHGlobal:
      out += ":p=" + alg.p->to_string();
      if (alg.acceptance == Acceptance::ImprovingAndEqual) out += ",acc=ie";
      break;
    case AlgorithmKind::Metropolis:
      out += ":alpha=" + ParamExpr::constant(*alg.metropolis_alpha).to_string();
      break;
    case AlgorithmKind::OnePlusOneEA:
      break;
  }
  return out;
}

// ---------------------------------------------------------------- search

SearchState SearchState::from_bits(const BenchmarkSpec& bench, BitString x) {
  SearchState s;
  s.fitness = evaluate(bench, x);
  s.level = popcount(x);
  s.x = std::move(x);
  return s;
}

namespace {

void require_kind(const ResolvedAlgorithm& alg, AlgorithmKind expected) {
  if (alg.kind != expected) {
    throw ContractViolation(std::string(kind_name(expected)) + " step called with a " +
                            std::string(kind_name(alg.kind)) + " algorithm");
  }
}

bool mixed_acceptance(const ResolvedAlgorithm& alg, Fitness parent, Fitness child, RngStream& rng) {
  // ALLMOVES with probability p, otherwise the configured improving operator.
  if (rng.bernoulli(alg.p_double)) return true;
  return alg.acceptance == Acceptance::OnlyImproving ? child > parent : child >= parent;
}

/// Positions flipped by standard bit mutation with rate 1/n, in increasing order.
void sample_bitwise_flips(int n, RngStream& rng, std::vector<int>& flips) {
  flips.clear();
  const double rate = 1.0 / n;
  std::uint64_t pos = rng.geometric_failures(rate);
  while (pos < static_cast<std::uint64_t>(n)) {
    flips.push_back(static_cast<int>(pos));
    pos += 1 + rng.geometric_failures(rate);
  }
}

template <class Accept>
SearchState bitwise_step(SearchState state, const BenchmarkSpec& bench, RngStream& rng, Accept accept) {
  thread_local std::vector<int> flips;
  sample_bitwise_flips(bench.n, rng, flips);
  int new_level = state.level;
  for (int pos : flips) new_level += state.x[pos] ? -1 : 1;
  const Fitness child = level_fitness(bench, new_level);
  if (accept(state.fitness, child)) {
    for (int pos : flips) state.x[pos] ^= 1;
    state.level = new_level;
    state.fitness = child;
  }
  ++state.iterations;
  return state;
}

template <class Accept>
SearchState one_bit_step(SearchState state, const BenchmarkSpec& bench, RngStream& rng, Accept accept) {
  const auto pos = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(bench.n)));
  const int new_level = state.level + (state.x[pos] ? -1 : 1);
  const Fitness child = level_fitness(bench, new_level);
  if (accept(state.fitness, child)) {
    state.x[pos] ^= 1;
    state.level = new_level;
    state.fitness = child;
  }
  ++state.iterations;
  return state;
}

}  // namespace

SearchState mahh_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                      RngStream& rng) {
  require_kind(alg, AlgorithmKind::MAHH);
  return one_bit_step(std::move(state), bench, rng,
                      [&](Fitness parent, Fitness child) { return mixed_acceptance(alg, parent, child, rng); });
}

SearchState metropolis_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                            RngStream& rng) {
  require_kind(alg, AlgorithmKind::Metropolis);
  return one_bit_step(std::move(state), bench, rng, [&](Fitness parent, Fitness child) {
    if (child >= parent) return true;
    const double delta = static_cast<double>(child.twice() - parent.twice()) / 2.0;
    return rng.uniform01() <= std::pow(alg.alpha_double, delta);
  });
}

SearchState opo_ea_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                        RngStream& rng) {
  require_kind(alg, AlgorithmKind::OnePlusOneEA);
  return bitwise_step(std::move(state), bench, rng, [](Fitness parent, Fitness child) { return child >= parent; });
}

SearchState mahh_global_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                             RngStream& rng) {
  require_kind(alg, AlgorithmKind::MAHHGlobal);
  return bitwise_step(std::move(state), bench, rng,
                      [&](Fitness parent, Fitness child) { return mixed_acceptance(alg, parent, child, rng); });
}

SearchState step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, RngStream& rng) {
  switch (alg.kind) {
    case AlgorithmKind::MAHH:
      return mahh_step(std::move(state), bench, alg, rng);
    case AlgorithmKind::Metropolis:
      return metropolis_step(std::move(state), bench, alg, rng);
    case AlgorithmKind::OnePlusOneEA:
      return opo_ea_step(std::move(state), bench, alg, rng);
    case AlgorithmKind::MAHHGlobal:
      return mahh_global_step(std::move(state), bench, alg, rng);
  }
  throw ContractViolation("unknown algorithm kind");
}

InitSpec parse_init(std::string_view text) {
  const std::string t = detail::trim(text);
  if (t == "uniform" || t == "UniformRandom") return UniformRandomInit{};
  if (t.rfind("level:", 0) == 0) return AtLevelInit{detail::parse_int(std::string_view(t).substr(6), "init level")};
  throw DomainError("init must be 'uniform' or 'level:<k>', got '" + t + "'");
}

std::string to_string(const InitSpec& init) {
  if (const auto* at = std::get_if<AtLevelInit>(&init)) return "level:" + std::to_string(at->level);
  return "uniform";
}

SearchState initial_state(const BenchmarkSpec& bench, const InitSpec& init, RngStream& rng) {
  BitString x(static_cast<std::size_t>(bench.n), 0);
  if (const auto* at = std::get_if<AtLevelInit>(&init)) {
    if (at->level < 0 || at->level > bench.n) {
      throw DomainError("initial level " + std::to_string(at->level) + " outside [0, n]");
    }
    std::fill_n(x.begin(), at->level, std::uint8_t{1});
  } else {
    for (int i = 0; i < bench.n; i += 64) {
      const std::uint64_t word = rng();
      for (int b = 0; b < 64 && i + b < bench.n; ++b) x[i + b] = static_cast<std::uint8_t>((word >> b) & 1U);
    }
  }
  return SearchState::from_bits(bench, std::move(x));
}

TrialRecord run_until_optimum(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, RngStream& rng,
                              std::uint64_t max_iters, const InitSpec& init) {
  if (max_iters == 0) throw DomainError("max_iters must be positive");
  TrialRecord record;
  record.seed = rng.seed();
  record.stream_id = rng.stream_id();

  const int target = global_optimum_level(bench);
  const std::optional<int> local = local_optimum_level(bench);
  SearchState state = initial_state(bench, init, rng);

  auto note_levels = [&]() {
    if (local && !record.first_hit_local_opt && state.level == *local) {
      record.first_hit_local_opt = state.iterations;
    }
  };
  note_levels();
  while (state.level != target && state.iterations < max_iters) {
    state = step(std::move(state), bench, alg, rng);
    note_levels();
  }
  record.iterations = state.iterations;
  record.hit_optimum = state.level == target;
  record.truncated = !record.hit_optimum;
  if (record.hit_optimum) record.first_hit_global_opt = state.iterations;
  return record;
}

}  // namespace mahh
