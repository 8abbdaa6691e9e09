#pragma once

#include "mahh/benchmarks.hpp"
#include "mahh/numeric.hpp"
#include "mahh/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace mahh {

enum class AlgorithmKind { MAHH, Metropolis, OnePlusOneEA, MAHHGlobal };

/// The non-ALLMOVES operator mixed in by the MAHH family.
enum class Acceptance { OnlyImproving, ImprovingAndEqual };

/// A mixing probability that may depend on the instance. `m` is the jump
/// size (or cliff width) of the benchmark the parameter is resolved against.
class ParamExpr {
 public:
  enum class Form {
    Constant,            // p = c
    MOverN,              // p = m/n
    MOverEightEN,        // p = m/(8en)
    InvOnePlusEpsN,      // p = 1/((1+eps)n)
  };

  static ParamExpr constant(const Rational& c);
  static ParamExpr m_over_n() { return ParamExpr(Form::MOverN, 0); }
  static ParamExpr m_over_eight_e_n() { return ParamExpr(Form::MOverEightEN, 0); }
  static ParamExpr inv_one_plus_eps_n(const Rational& eps);

  /// Accepts `0.1`, `1/8`, `m/n`, `m/(8en)` and `1/((1+eps)n)` (with `eps`
  /// supplied separately).
  static ParamExpr parse(std::string_view text, std::optional<Rational> eps = std::nullopt);

  Form form() const { return form_; }
  /// The constant for Form::Constant, eps for Form::InvOnePlusEpsN.
  const Rational& value() const { return value_; }
  ParamValue resolve(const BenchmarkSpec& bench) const;
  std::string to_string() const;

  bool operator==(const ParamExpr&) const = default;

 private:
  ParamExpr(Form form, Rational value) : form_(form), value_(std::move(value)) {}
  Form form_;
  Rational value_;  // the constant, or eps
};

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::MAHH;
  std::optional<ParamExpr> p;                 // MAHH family only
  std::optional<Rational> metropolis_alpha;   // Metropolis only
  Acceptance acceptance = Acceptance::OnlyImproving;

  static AlgorithmSpec mahh(ParamExpr p, Acceptance acc = Acceptance::OnlyImproving);
  static AlgorithmSpec mahh_global(ParamExpr p, Acceptance acc = Acceptance::OnlyImproving);
  static AlgorithmSpec metropolis(const Rational& alpha);
  static AlgorithmSpec one_plus_one_ea();

  void validate() const;
};

/// An AlgorithmSpec with every parameter evaluated for one benchmark instance.
struct ResolvedAlgorithm {
  AlgorithmKind kind = AlgorithmKind::MAHH;
  Acceptance acceptance = Acceptance::OnlyImproving;
  ParamValue p;      // meaningful for the MAHH family
  ParamValue alpha;  // meaningful for Metropolis
  double p_double = 0.0;
  double alpha_double = 0.0;

  bool one_bit() const { return kind == AlgorithmKind::MAHH || kind == AlgorithmKind::Metropolis; }
};

/// Evaluates symbolic parameters against `bench` and checks 0 <= p <= 1, alpha > 1.
ResolvedAlgorithm resolve(const AlgorithmSpec& alg, const BenchmarkSpec& bench);

/// `mahh:p=<p>[,acc=oi|ie]`, `metropolis:alpha=<a>`, `ea`, `mahh-global:p=<p>[,acc=oi|ie]`.
AlgorithmSpec parse_algorithm(std::string_view text);
std::string to_string(const AlgorithmSpec& alg);
std::string_view kind_name(AlgorithmKind kind);

struct SearchState {
  BitString x;
  int level = 0;
  Fitness fitness;
  std::uint64_t iterations = 0;

  static SearchState from_bits(const BenchmarkSpec& bench, BitString x);
};

SearchState mahh_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                      RngStream& rng);
SearchState metropolis_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                            RngStream& rng);
SearchState opo_ea_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                        RngStream& rng);
SearchState mahh_global_step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg,
                             RngStream& rng);
/// Dispatches on alg.kind.
SearchState step(SearchState state, const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, RngStream& rng);

struct UniformRandomInit {};
struct AtLevelInit {
  int level;
};
using InitSpec = std::variant<UniformRandomInit, AtLevelInit>;

/// `uniform` or `level:<k>`.
InitSpec parse_init(std::string_view text);
std::string to_string(const InitSpec& init);

/// Uniform random string, or the string with the first k bits set.
SearchState initial_state(const BenchmarkSpec& bench, const InitSpec& init, RngStream& rng);

struct TrialRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t iterations = 0;
  bool hit_optimum = false;
  bool truncated = false;
  std::optional<std::uint64_t> first_hit_local_opt;
  std::optional<std::uint64_t> first_hit_global_opt;
};

/// Runs the step operator until the current solution is optimal or
/// `max_iters` iterations have been spent. The initial solution costs nothing.
TrialRecord run_until_optimum(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, RngStream& rng,
                              std::uint64_t max_iters, const InitSpec& init);

}  // namespace mahh
