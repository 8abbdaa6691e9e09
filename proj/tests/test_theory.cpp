#include "mahh/theory.hpp"

#include "mahh/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mahh;

namespace {

ResolvedAlgorithm mahh_p(const BenchmarkSpec& b, Rational p) {
  return resolve(AlgorithmSpec::mahh(ParamExpr::constant(p)), b);
}

std::vector<Rational> p_grid(int n, int m) {
  return {Rational(1, 2 * n), Rational(m, n), Rational(1, 10), Rational(1, 2), Rational(9, 10), Rational(1)};
}

}  // namespace

TEST_CASE("last step formula") {
  CHECK(last_step_formula<Rational>(4, 2, Rational(1, 2)).rational() == Rational(41, 2));
  CHECK(last_step_formula<Rational>(10, 2, Rational(0)).is_infinite());
  CHECK(last_step_formula<Real>(10, 2, Real(0)).is_infinite());
  CHECK_THROWS_AS(last_step_formula<Rational>(10, 2, Rational(3, 2)), DomainError);
  CHECK_THROWS_AS(last_step_formula<Rational>(10, 1, Rational(1, 2)), DomainError);
  const Real approx = last_step_formula<Real>(4, 2, Real(0.5)).real();
  CHECK(static_cast<double>(approx) == 20.5);
}

TEST_CASE("last step formula equals the chain's last hitting time") {
  for (int n = 4; n <= 30; ++n) {
    for (int m = 2; m <= std::min(4, n); ++m) {
      const BenchmarkSpec b = BenchmarkSpec::jump(n, m);
      for (const Rational& p : p_grid(n, m)) {
        const RationalChain c = build_level_chain<Rational>(b, mahh_p(b, p));
        const ExactValue formula = last_step_formula<Rational>(n, m, p);
        INFO("n=" << n << " m=" << m << " p=" << p);
        REQUIRE(formula == hitting_time_closed_form(c, n - 1));
        REQUIRE(formula == absorbing_hitting_times(c)[n - 1]);
        for (int k = 0; k < n; ++k) REQUIRE(ratio_pk<Rational>(k, n, m, p).rational() == c.down(k) / c.up(k));
      }
    }
  }
}

TEST_CASE("ratio cases") {
  CHECK(ratio_pk<Rational>(0, 10, 3, Rational(1, 4)).rational() == 0);
  CHECK(ratio_pk<Rational>(7, 10, 3, Rational(1, 4)).rational() == Rational(7, 3));
  CHECK(ratio_pk<Rational>(9, 10, 3, Rational(1, 4)).rational() == 9);
  CHECK(ratio_pk<Rational>(8, 10, 3, Rational(1, 4)).rational() == 16);
  CHECK(ratio_pk<Rational>(8, 10, 3, Rational(0)).is_infinite());
  CHECK_THROWS_AS(ratio_pk<Rational>(10, 10, 3, Rational(1, 4)), DomainError);
}

TEST_CASE("small-m lower bound pieces") {
  const SmallMBound b = lower_bound_small_m(10, 2);
  CHECK(b.binomial == 120);
  CHECK(static_cast<double>(b.asymptotic) == doctest::Approx(1000.0 / 6));
  CHECK(static_cast<double>(b.exp_corrected) == doctest::Approx(1000.0 / 6 * std::exp(-0.6)));
  CHECK(static_cast<double>(b.product_form) == doctest::Approx(1000.0 * std::pow(0.8, 3) / 6));
  CHECK_THROWS_AS(lower_bound_small_m(4, 3), DomainError);
}

TEST_CASE("small-m bound chain holds link by link where it is valid") {
  for (int n = 3; n <= 200; ++n) {
    for (int m = 2; 2 * m - 1 <= n && m <= 6; ++m) {
      const SmallMBound b = lower_bound_small_m(n, m);
      INFO("n=" << n << " m=" << m);
      // C(n,k) = n^k/k! prod (1-i/n) >= n^k/k! (1-(k-1)/n)^k.
      REQUIRE(Real(b.binomial) >= b.product_form);
      // The binomial also dominates the exponential comparator.
      REQUIRE(Real(b.binomial) >= b.exp_corrected);
    }
  }
  // The product form itself sits below the exponential comparator: the
  // inequality (1-x)^y <= e^(-xy) runs the other way.
  const SmallMBound b = lower_bound_small_m(10, 2);
  CHECK(b.product_form < b.exp_corrected);
}

TEST_CASE("last step dominates the binomial for every p") {
  for (int n = 4; n <= 30; ++n) {
    for (int m = 2; m <= std::min(4, n); ++m) {
      if (n - 2 * m + 1 < 0) continue;
      const Integer bound = lower_bound_small_m(n, m).binomial;
      for (const Rational& p : {Rational(1, 100), Rational(1, 10), Rational(m, n), Rational(1, 2), Rational(1)}) {
        REQUIRE(last_step_formula<Rational>(n, m, p).rational() >= Rational(bound));
      }
    }
  }
}

TEST_CASE("linear-m regime") {
  CHECK(static_cast<double>(kappa(Real(0.25))) == doctest::Approx(1.7548).epsilon(1e-4));
  CHECK(static_cast<double>(kappa(Real(0.4999999))) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(kappa(Real(0.1)) > 1);
  const LinearMBound b = lower_bound_linear_m(20, Real(0.25));
  CHECK(b.m == 5);
  CHECK(b.binomial == 15504);
  CHECK(Real(b.binomial) >= mp::pow(Real(1.5), 20));
  CHECK_THROWS_AS(lower_bound_linear_m(20, Real(0.5)), DomainError);
  CHECK_THROWS_AS(lower_bound_linear_m(4, Real(0.25)), DomainError);

  // C(n, n - alpha n)^(1/n) climbs toward kappa.
  Real previous = 0;
  for (int n : {20, 40, 80, 160}) {
    const LinearMBound l = lower_bound_linear_m(n, Real(0.25));
    const Real root = mp::pow(Real(l.binomial), Real(1) / n);
    CHECK(root > previous);
    CHECK(root < l.kappa);
    previous = root;
  }
}

TEST_CASE("classic upper comparator") {
  CHECK(static_cast<double>(upper_bound_classic(100, 2)) == doctest::Approx(100 * std::log(100.0) + 500000));
  std::vector<std::pair<double, double>> pts;
  for (int n : {64, 128, 256, 512}) pts.emplace_back(n, static_cast<double>(upper_bound_classic(n, 2)));
  CHECK(std::abs(loglog_slope(pts).slope - 3.0) <= 0.01);

  // Exact runtime over the comparator stays in a narrow band.
  double lo = 1e300;
  double hi = 0;
  for (int n : {50, 100, 200, 400}) {
    const BenchmarkSpec b = BenchmarkSpec::jump(n, 2);
    const auto alg = resolve(AlgorithmSpec::mahh(ParamExpr::m_over_n()), b);
    const double ratio = expected_runtime_exact(b, alg, UniformRandomInit{}).to_double() /
                         static_cast<double>(upper_bound_classic(n, 2));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 1.5);
}

TEST_CASE("global upper comparator") {
  for (int n : {2, 10, 100, 1000}) CHECK(upper_bound_global(n, 2).ea_branch_wins);
  const GlobalUpperBound g = upper_bound_global(100, 3);
  CHECK(g.ea_branch_wins);
  CHECK(static_cast<double>(g.ea_branch) == doctest::Approx(std::exp(1.0) * 1e6));
  CHECK(static_cast<double>(g.mahh_branch) == doctest::Approx(64 * std::pow(std::exp(1.0) * 100, 5) / 54));
  CHECK(static_cast<double>(g.value) == doctest::Approx(100 * std::log(100.0) + 3 * std::exp(1.0) * 1e6));
  CHECK_THROWS_AS(upper_bound_global(1, 2), DomainError);
}

TEST_CASE("path probability") {
  for (int n : {5, 10, 50}) CHECK(path_probability<Rational>(n, 2, Rational(2, n)) == Rational(4, n * n * n));
  CHECK(path_probability<Rational>(2, 2, Rational(1)) == Rational(1, 2));
  CHECK_THROWS_AS(path_probability<Rational>(10, 1, Rational(1, 2)), DomainError);
}

TEST_CASE("drift of MAHH towards the local optimum") {
  for (int n : {20, 50, 100}) {
    for (int m : {2, 3}) {
      const BenchmarkSpec b = BenchmarkSpec::jump(n, m);
      for (const Rational& p : {Rational(m, n), Rational(1, 2 * n), Rational(0)}) {
        const RationalChain c = build_level_chain<Rational>(b, mahh_p(b, p));
        const std::vector<Rational> drift = drift_profile(c, n - m, Distance::absolute());
        for (int level = 0; level < n; ++level) {
          if (level == n - m) continue;
          const Rational d = Distance::absolute().operator()<Rational>(level, n - m);
          REQUIRE(drift[level] >= d / n);
        }
      }
    }
  }
  const BenchmarkSpec b = BenchmarkSpec::jump(10, 2);
  const ExactValue d = drift_onestep(b, mahh_p(b, Rational(1, 5)), 3, Distance::absolute());
  // up (7/10) reduces the distance, down (3/10 * 1/5) increases it.
  CHECK(d.rational() == Rational(7, 10) - Rational(3, 50));
  CHECK_THROWS_AS(drift_onestep(BenchmarkSpec::onemax(10), mahh_p(BenchmarkSpec::onemax(10), 0), 3,
                                Distance::absolute()),
                  DomainError);
  CHECK_THROWS_AS(drift_onestep(b, mahh_p(b, 0), 11, Distance::absolute()), DomainError);
}

TEST_CASE("weighted potential drift of MAHH with global mutation") {
  for (int n : {50, 70}) {
    for (int m : {2, 3}) {
      const BenchmarkSpec b = BenchmarkSpec::jump(n, m);
      const auto alg = resolve(AlgorithmSpec::mahh_global(ParamExpr::m_over_eight_e_n()), b);
      const RealChain c = build_level_chain<Real>(b, alg);
      const auto drift = drift_profile(c, n - m, Distance::potential(4));
      for (int level = 0; level < n; ++level) {
        if (level == n - m) continue;
        INFO("n=" << n << " m=" << m << " level=" << level);
        REQUIRE(drift[level] > 0);
      }
    }
  }
  CHECK(Distance::potential(4).operator()<Rational>(12, 10) == 8);
  CHECK(Distance::potential(4).operator()<Rational>(7, 10) == 3);
}

TEST_CASE("bound reports") {
  const auto reports = jump_bound_reports(10, 2, ParamExpr::m_over_n());
  REQUIRE(reports.size() == 5);
  CHECK(reports[0].name == "small_m_binomial");
  CHECK(reports[0].value.rational() == 120);
  CHECK(reports[0].satisfied == true);
  CHECK(reports[0].compared_to == last_step_formula<Rational>(10, 2, Rational(1, 5)));
  CHECK(reports[3].name == "classic_upper");
  CHECK_FALSE(reports[3].satisfied.has_value());
  CHECK(reports[4].name == "global_upper");

  // A bound that fails is reported, not thrown.
  const BoundReport r = make_lower_bound("x", 5, 2, "0.5", ExactValue(Rational(10)), ExactValue(Rational(3)));
  CHECK(r.satisfied == false);
  CHECK(r.ratio == doctest::Approx(0.3));

  std::ostringstream os;
  write_bound_reports_csv(os, reports);
  const std::string header = os.str().substr(0, os.str().find('\n'));
  CHECK(header == "bound_name,n,m,p,value,exact,satisfied,ratio");
  CHECK(os.str().find("small_m_binomial,10,2,0.2,120,") != std::string::npos);
  CHECK(os.str().find(",true,") != std::string::npos);
  CHECK(os.str().find(",na,") != std::string::npos);

  // Only the linear-m row applies when 2m - 1 > n.
  CHECK(jump_bound_reports(4, 3, ParamExpr::constant(Rational(1, 2))).size() == 3);
}
