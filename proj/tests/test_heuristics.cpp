#include "mahh/heuristics.hpp"

#include "mahh/chain.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <cmath>

using namespace mahh;

namespace {

ResolvedAlgorithm mahh_p(const BenchmarkSpec& b, Rational p, Acceptance acc = Acceptance::OnlyImproving) {
  return resolve(AlgorithmSpec::mahh(ParamExpr::constant(p), acc), b);
}
ResolvedAlgorithm global_p(const BenchmarkSpec& b, Rational p, Acceptance acc = Acceptance::OnlyImproving) {
  return resolve(AlgorithmSpec::mahh_global(ParamExpr::constant(p), acc), b);
}
ResolvedAlgorithm ea(const BenchmarkSpec& b) { return resolve(AlgorithmSpec::one_plus_one_ea(), b); }
ResolvedAlgorithm metro(const BenchmarkSpec& b, Rational alpha) {
  return resolve(AlgorithmSpec::metropolis(alpha), b);
}

BitString at_level(int n, int level) {
  BitString x(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < level; ++i) x[i] = 1;
  return x;
}

/// Counts destination levels of `trials` independent single steps from x and
/// checks each against the exact law within 4 sigma.
void check_step_frequencies(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, const BitString& x,
                            const std::map<int, Rational>& law, int trials, std::uint64_t seed) {
  std::map<int, int> counts;
  RngStream rng(seed, 0);
  const SearchState start = SearchState::from_bits(bench, x);
  for (int t = 0; t < trials; ++t) ++counts[step(start, bench, alg, rng).level];
  for (int level = 0; level <= bench.n; ++level) {
    const auto it = law.find(level);
    const double q = it == law.end() ? 0.0 : static_cast<double>(it->second);
    const double expected = trials * q;
    const double sigma = std::sqrt(trials * q * (1 - q));
    INFO("level " << level << " expected " << expected << " observed " << counts[level]);
    if (q == 0.0) {
      CHECK(counts[level] == 0);
    } else {
      CHECK(std::abs(counts[level] - expected) <= 4 * sigma);
    }
  }
}

}  // namespace

TEST_CASE("mahh at the optimum with p = 0 never moves") {
  const BenchmarkSpec b = BenchmarkSpec::jump(8, 3);
  const ResolvedAlgorithm alg = mahh_p(b, 0);
  RngStream rng(3, 0);
  SearchState s = SearchState::from_bits(b, at_level(8, 8));
  for (int i = 0; i < 500; ++i) s = mahh_step(std::move(s), b, alg, rng);
  CHECK(s.level == 8);
  CHECK(s.iterations == 500);
}

TEST_CASE("mahh acceptance table on small cases") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(4, 2);
  const Rational p(1, 3);
  auto law = oracle::step_level_law(jump, mahh_p(jump, p), at_level(4, 2));
  CHECK(law[3] == p / 2);
  CHECK(law[1] == p / 2);
  CHECK(law[2] == 1 - p);

  const BenchmarkSpec onemax = BenchmarkSpec::onemax(10);
  for (int k = 0; k < 10; ++k) {
    auto l = oracle::step_level_law(onemax, mahh_p(onemax, p), at_level(10, k));
    CHECK(l[k + 1] == Rational(10 - k, 10));
  }
}

TEST_CASE("metropolis acceptance") {
  const BenchmarkSpec onemax = BenchmarkSpec::onemax(6);
  auto law = oracle::step_level_law(onemax, metro(onemax, 4), at_level(6, 6));
  CHECK(law[5] == Rational(1, 4));
  CHECK(law[6] == Rational(3, 4));
  CHECK(oracle::acceptance(metro(onemax, 4), Fitness::from_integer(3), Fitness::from_integer(3)) == 1);
  CHECK(oracle::acceptance(metro(onemax, 4), Fitness::from_integer(3), Fitness::from_integer(2)) == Rational(1, 4));
  check_step_frequencies(onemax, metro(onemax, 4), at_level(6, 6), law, 40000, 11);
}

TEST_CASE("(1+1) EA one-step probabilities") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(4, 2);
  auto law = oracle::step_level_law(jump, ea(jump), at_level(4, 2));
  CHECK(law[4] == Rational(9, 256));
  const int n = 7;
  const BenchmarkSpec onemax = BenchmarkSpec::onemax(n);
  auto row = oracle::step_level_law(onemax, ea(onemax), at_level(n, n - 1));
  CHECK(row[n] == Rational(1, n) * integer_power(Rational(n - 1, n), n - 1));
  // Zero flips leave the state unchanged and are accepted.
  RngStream rng(5, 0);
  int zero_flip_moves = 0;
  const SearchState s = SearchState::from_bits(onemax, at_level(n, 3));
  for (int t = 0; t < 20000; ++t) {
    const SearchState next = opo_ea_step(s, onemax, ea(onemax), rng);
    REQUIRE(next.fitness >= s.fitness);
    zero_flip_moves += next.x == s.x;
  }
  // Unchanged strings come from zero flips or from rejected offspring.
  Rational unchanged = integer_power(Rational(n - 1, n), n);
  for (int a = 0; a <= n - 3; ++a) {
    for (int b = 0; b <= 3; ++b) {
      if (a + b == 0 || a >= b) continue;
      unchanged += Rational(binomial(n - 3, a) * binomial(3, b)) * integer_power(Rational(1, n), a + b) *
                   integer_power(Rational(n - 1, n), n - a - b);
    }
  }
  const double q = static_cast<double>(unchanged);
  CHECK(std::abs(zero_flip_moves - 20000 * q) <= 4 * std::sqrt(20000 * q * (1 - q)));
}

TEST_CASE("mahh-global one-step probabilities") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(4, 2);
  const Rational p(2, 5);
  auto law = oracle::step_level_law(jump, global_p(jump, p), at_level(4, 2));
  CHECK(law[3] == p * Rational(30, 128));
  // p = 1: every mutation accepted, so the level law is the mutation kernel.
  auto walk = oracle::step_level_law(jump, global_p(jump, 1), at_level(4, 1));
  for (int j = 0; j <= 4; ++j) CHECK(walk[j] == oracle::mask_kernel(4, 1, j));
}

TEST_CASE("mahh-global with p = 0 and IE has the (1+1) EA level chain") {
  for (const BenchmarkSpec& b : {BenchmarkSpec::jump(9, 3), BenchmarkSpec::cliff(10, 2), BenchmarkSpec::onemax(8)}) {
    const auto a = build_level_chain<Rational>(b, global_p(b, 0, Acceptance::ImprovingAndEqual));
    const auto e = build_level_chain<Rational>(b, ea(b));
    CHECK(a.trans == e.trans);
  }
}

TEST_CASE("step operators reject the wrong algorithm kind") {
  const BenchmarkSpec b = BenchmarkSpec::onemax(5);
  RngStream rng(0, 0);
  const SearchState s = SearchState::from_bits(b, at_level(5, 2));
  CHECK_THROWS_AS(mahh_step(s, b, ea(b), rng), ContractViolation);
  CHECK_THROWS_AS(metropolis_step(s, b, mahh_p(b, 0), rng), ContractViolation);
  CHECK_THROWS_AS(opo_ea_step(s, b, mahh_p(b, 0), rng), ContractViolation);
  CHECK_THROWS_AS(mahh_global_step(s, b, mahh_p(b, 0), rng), ContractViolation);
}

TEST_CASE("search state caches stay consistent across steps") {
  const BenchmarkSpec b = BenchmarkSpec::cliff(16, 4);
  for (const ResolvedAlgorithm& alg : {mahh_p(b, Rational(1, 5)), global_p(b, Rational(1, 5)), ea(b), metro(b, 3)}) {
    RngStream rng(9, 1);
    SearchState s = initial_state(b, UniformRandomInit{}, rng);
    for (int i = 0; i < 300; ++i) {
      const std::uint64_t before = s.iterations;
      s = step(std::move(s), b, alg, rng);
      REQUIRE(s.iterations == before + 1);
      REQUIRE(s.level == popcount(s.x));
      REQUIRE(s.fitness == evaluate(b, s.x));
    }
  }
}

TEST_CASE("level-Markov property: every representative string has the chain row") {
  std::vector<std::pair<BenchmarkSpec, ResolvedAlgorithm>> cells;
  for (int n : {6, 8, 10}) {
    const BenchmarkSpec jump = BenchmarkSpec::jump(n, 3);
    const BenchmarkSpec cliff = BenchmarkSpec::cliff(n, 2);
    const BenchmarkSpec onemax = BenchmarkSpec::onemax(n);
    cells.emplace_back(jump, mahh_p(jump, Rational(1, 7)));
    cells.emplace_back(jump, mahh_p(jump, Rational(1, 7), Acceptance::ImprovingAndEqual));
    cells.emplace_back(cliff, mahh_p(cliff, Rational(2, 3)));
    cells.emplace_back(onemax, metro(onemax, 3));
    cells.emplace_back(jump, metro(jump, Rational(5, 2)));
  }
  for (int n : {5, 7}) {
    const BenchmarkSpec jump = BenchmarkSpec::jump(n, 2);
    const BenchmarkSpec cliff = BenchmarkSpec::cliff(n, 2);
    cells.emplace_back(jump, ea(jump));
    cells.emplace_back(jump, global_p(jump, Rational(1, 4)));
    cells.emplace_back(cliff, global_p(cliff, Rational(1, 4), Acceptance::ImprovingAndEqual));
    cells.emplace_back(cliff, ea(cliff));
  }
  for (const auto& [bench, alg] : cells) {
    const auto chain = build_level_chain<Rational>(bench, alg);
    const int n = bench.n;
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
      const BitString x = oracle::bits_from_mask(n, mask);
      const int i = popcount(x);
      if (i == n) continue;  // absorbing in the chain
      const auto law = oracle::step_level_law(bench, alg, x);
      for (int j = 0; j <= n; ++j) {
        const auto it = law.find(j);
        const Rational q = it == law.end() ? Rational(0) : it->second;
        INFO(to_string(bench) << " " << kind_name(alg.kind) << " mask " << mask << " j " << j);
        REQUIRE(q == chain.at(i, j));
      }
    }
  }
}

TEST_CASE("one-bit OI and IE induce identical level chains") {
  for (int n = 4; n <= 30; ++n) {
    std::vector<BenchmarkSpec> specs = {BenchmarkSpec::onemax(n), BenchmarkSpec::jump(n, 2),
                                        BenchmarkSpec::jump(n, std::min(n, 4)), BenchmarkSpec::cliff(n, 2)};
    for (const BenchmarkSpec& b : specs) {
      const auto oi = build_level_chain<Rational>(b, mahh_p(b, Rational(1, 10)));
      const auto ie = build_level_chain<Rational>(b, mahh_p(b, Rational(1, 10), Acceptance::ImprovingAndEqual));
      REQUIRE(oi.trans == ie.trans);
      // No one-bit move preserves fitness.
      for (int l = 0; l < n; ++l) REQUIRE(level_fitness(b, l) != level_fitness(b, l + 1));
    }
  }
}

TEST_CASE("simulated steps follow the exact law") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(10, 3);
  const BenchmarkSpec cliff = BenchmarkSpec::cliff(8, 2);
  const ResolvedAlgorithm m = mahh_p(jump, Rational(1, 4));
  const ResolvedAlgorithm g = global_p(jump, Rational(1, 4));
  check_step_frequencies(jump, m, at_level(10, 7), oracle::step_level_law(jump, m, at_level(10, 7)), 40000, 1);
  check_step_frequencies(jump, g, at_level(10, 8), oracle::step_level_law(jump, g, at_level(10, 8)), 40000, 2);
  check_step_frequencies(cliff, ea(cliff), at_level(8, 6), oracle::step_level_law(cliff, ea(cliff), at_level(8, 6)),
                         40000, 3);
}

TEST_CASE("run_until_optimum contracts") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(12, 3);
  RngStream rng(1, 1);
  const TrialRecord at_top = run_until_optimum(jump, mahh_p(jump, Rational(1, 2)), rng, 10, AtLevelInit{12});
  CHECK(at_top.iterations == 0);
  CHECK(at_top.hit_optimum);
  CHECK(at_top.first_hit_global_opt == 0u);

  // Elitist MAHH stalls at the local optimum.
  const TrialRecord stuck = run_until_optimum(jump, mahh_p(jump, 0), rng, 5000, AtLevelInit{2});
  CHECK(stuck.truncated);
  CHECK_FALSE(stuck.hit_optimum);
  CHECK(stuck.iterations == 5000);
  REQUIRE(stuck.first_hit_local_opt.has_value());
  CHECK(*stuck.first_hit_local_opt < 5000);

  CHECK_THROWS_AS(run_until_optimum(jump, ea(jump), rng, 0, UniformRandomInit{}), DomainError);
  CHECK_THROWS_AS(run_until_optimum(jump, ea(jump), rng, 10, AtLevelInit{13}), DomainError);
}

TEST_CASE("trial records replay from their stream") {
  const BenchmarkSpec jump = BenchmarkSpec::jump(14, 2);
  const ResolvedAlgorithm alg = global_p(jump, Rational(1, 20));
  for (std::uint64_t stream = 0; stream < 5; ++stream) {
    RngStream a(42, stream);
    RngStream b(42, stream);
    const TrialRecord x = run_until_optimum(jump, alg, a, 1'000'000, UniformRandomInit{});
    const TrialRecord y = run_until_optimum(jump, alg, b, 1'000'000, UniformRandomInit{});
    CHECK(x.iterations == y.iterations);
    CHECK(x.first_hit_local_opt == y.first_hit_local_opt);
    CHECK(x.seed == 42);
    CHECK(x.stream_id == stream);
  }
}

TEST_CASE("algorithm spec parsing and validation") {
  CHECK(to_string(parse_algorithm("mahh:p=0.1")) == "mahh:p=0.1");
  CHECK(to_string(parse_algorithm("mahh:p=1/3,acc=ie")) == "mahh:p=1/3,acc=ie");
  CHECK(to_string(parse_algorithm("mahh-global:p=m/(8en)")) == "mahh-global:p=m/(8en)");
  CHECK(to_string(parse_algorithm("mahh:p=1/((1+eps)n),eps=1")) == "mahh:p=1/((1+eps)n),eps=1");
  CHECK(to_string(parse_algorithm("metropolis:alpha=4")) == "metropolis:alpha=4");
  CHECK(to_string(parse_algorithm("ea")) == "ea");
  CHECK(parse_algorithm("mahh:p=0.125").p->value() == Rational(1, 8));

  try {
    parse_algorithm("mahh:p=1.5").validate();
    FAIL("p = 1.5 accepted");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("p must lie in [0,1]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_algorithm("metropolis:alpha=1").validate(), DomainError);
  CHECK_THROWS_AS(parse_algorithm("mahh"), DomainError);
  CHECK_THROWS_AS(parse_algorithm("mahh:p=0.1,acc=xx"), DomainError);
  CHECK_THROWS_AS(parse_algorithm("ea:p=0.1"), DomainError);
  CHECK_THROWS_AS(parse_algorithm("sa:t=1"), DomainError);
  // OneMax has no m.
  CHECK_THROWS_AS(resolve(parse_algorithm("mahh:p=m/n"), BenchmarkSpec::onemax(10)), DomainError);
  const ResolvedAlgorithm r = resolve(parse_algorithm("mahh:p=m/n"), BenchmarkSpec::jump(20, 2));
  CHECK(*r.p.exact == Rational(1, 10));
  const ResolvedAlgorithm g = resolve(parse_algorithm("mahh-global:p=m/(8en)"), BenchmarkSpec::jump(20, 2));
  CHECK_FALSE(g.p.exact.has_value());
  CHECK(g.p_double == doctest::Approx(2.0 / (8 * std::exp(1.0) * 20)));
  const ResolvedAlgorithm e = resolve(parse_algorithm("mahh:p=1/((1+eps)n),eps=1"), BenchmarkSpec::cliff(20, 3));
  CHECK(*e.p.exact == Rational(1, 40));
}

TEST_CASE("init specs") {
  CHECK(std::holds_alternative<UniformRandomInit>(parse_init("uniform")));
  CHECK(std::get<AtLevelInit>(parse_init("level:5")).level == 5);
  CHECK(to_string(parse_init("level:5")) == "level:5");
  CHECK_THROWS_AS(parse_init("zeros"), DomainError);
  const BenchmarkSpec b = BenchmarkSpec::onemax(100);
  RngStream rng(4, 4);
  double sum = 0;
  for (int i = 0; i < 4000; ++i) sum += initial_state(b, UniformRandomInit{}, rng).level;
  CHECK(std::abs(sum / 4000 - 50) < 4 * std::sqrt(25.0 / 4000));
}
