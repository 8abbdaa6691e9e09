#include "mahh/theory.hpp"

#include <limits>
#include <ostream>

namespace mahh {

namespace {

void require_jump_domain(int n, int m) {
  if (m < 2 || m > n) {
    throw DomainError("need 2 <= m <= n, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
  }
}

template <class S>
S binomial_as(int n, int k) {
  return ScalarTraits<S>::from_integer(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
}

Real factorial(int k) {
  Real f(1);
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

template <class S>
ExactValue last_step_formula(int n, int m, const S& p) {
  require_jump_domain(n, m);
  if (p < 0 || p > 1) throw DomainError("p must lie in [0,1]");
  if (p == 0) return ExactValue::infinity(ScalarTraits<S>::backend);
  S left(0);
  for (int k = 0; k <= n - m - 1; ++k) left += integer_power(p, -k) * binomial_as<S>(n, k);
  S right(0);
  for (int k = n - m; k <= n - 1; ++k) right += binomial_as<S>(n, k) * integer_power(p, k);
  return ExactValue(S(integer_power(p, n - 2 * m + 1) * left + integer_power(p, 1 - n) * right));
}

template <class S>
ExactValue ratio_pk(int k, int n, int m, const S& p) {
  require_jump_domain(n, m);
  if (k < 0 || k > n - 1) throw DomainError("k must lie in [0, n-1]");
  const S flips_ratio = S(k) / S(n - k);
  if (k <= n - m - 1) return ExactValue(S(flips_ratio * p));
  if (k == n - m) return ExactValue(flips_ratio);
  if (k == n - 1) return ExactValue(S(n - 1));
  if (p == 0) return ExactValue::infinity(ScalarTraits<S>::backend);
  return ExactValue(S(flips_ratio / p));
}

SmallMBound lower_bound_small_m(int n, int m) {
  require_jump_domain(n, m);
  const int k = 2 * m - 1;
  if (n - k < 0) throw DomainError("lower_bound_small_m needs n - 2m + 1 >= 0");
  SmallMBound b;
  b.n = n;
  b.m = m;
  b.binomial = binomial(static_cast<unsigned>(n), static_cast<unsigned>(n - k));
  const Real nk = integer_power(Real(n), k);
  b.asymptotic = nk / factorial(k);
  b.product_form = nk * integer_power(Real(1) - Real(k - 1) / n, k) / factorial(k);
  b.exp_corrected = b.asymptotic * mp::exp(-Real(k) * Real(k - 1) / n);
  return b;
}

Real kappa(const Real& alpha) {
  if (alpha <= 0 || alpha >= 1) throw DomainError("kappa needs 0 < alpha < 1");
  return 1 / (mp::pow(alpha, alpha) * mp::pow(1 - alpha, 1 - alpha));
}

LinearMBound lower_bound_linear_m(int n, const Real& alpha) {
  if (alpha <= 0 || alpha >= Real(0.5)) throw DomainError("lower_bound_linear_m needs 0 < alpha < 0.5");
  const int m = static_cast<int>(mp::round(alpha * n));
  if (m < 2) throw DomainError("round(alpha n) must be at least 2");
  require_jump_domain(n, m);
  LinearMBound b;
  b.n = n;
  b.m = m;
  b.binomial = binomial(static_cast<unsigned>(n), static_cast<unsigned>(n - m));
  b.kappa = kappa(alpha);
  return b;
}

Real upper_bound_classic(int n, int m) {
  require_jump_domain(n, m);
  return Real(n) * mp::log(Real(n)) +
         integer_power(Real(n), 2 * m - 1) / (factorial(m) * integer_power(Real(m), m - 2));
}

GlobalUpperBound upper_bound_global(int n, int m) {
  require_jump_domain(n, m);
  const Real e = real_e();
  GlobalUpperBound b;
  b.ea_branch = e * integer_power(Real(n), m);
  b.mahh_branch = integer_power(Real(8), m - 1) * integer_power(e * n, 2 * m - 1) /
                  (factorial(m) * integer_power(Real(m), m - 1));
  b.ea_branch_wins = b.ea_branch <= b.mahh_branch;
  b.value = Real(n) * mp::log(Real(n)) + Real(m) * (b.ea_branch_wins ? b.ea_branch : b.mahh_branch);
  return b;
}

template <class S>
S path_probability(int n, int m, const S& p) {
  require_jump_domain(n, m);
  S factorial_m(1);
  for (int i = 2; i <= m; ++i) factorial_m *= i;
  return factorial_m * integer_power(p, m - 1) / integer_power(S(n), m);
}

template <class S>
S Distance::operator()(int level, int local_optimum) const {
  if (level <= local_optimum) return S(local_optimum - level);
  const S gap(level - local_optimum);
  return kind == Kind::Absolute ? gap : S(ScalarTraits<S>::from_rational(alpha) * gap);
}

template <class S>
std::vector<S> drift_profile(const LevelChain<S>& chain, int local_optimum, const Distance& distance) {
  std::vector<S> drift(static_cast<std::size_t>(chain.size()), S(0));
  for (int i = 0; i < chain.size(); ++i) {
    const S here = distance.template operator()<S>(i, local_optimum);
    S sum(0);
    for (int j = 0; j < chain.size(); ++j) {
      if (chain.at(i, j) == 0 || j == i) continue;
      sum += chain.at(i, j) * (here - distance.template operator()<S>(j, local_optimum));
    }
    drift[i] = sum;
  }
  return drift;
}

ExactValue drift_onestep(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, int level,
                         const Distance& distance) {
  const std::optional<int> local = local_optimum_level(bench);
  if (!local) throw DomainError("drift needs a benchmark with a local optimum");
  if (level < 0 || level > bench.n) throw DomainError("level outside [0, n]");
  if (choose_backend(bench, alg) == Backend::Rational) {
    const RationalChain chain = build_level_chain<Rational>(bench, alg);
    return ExactValue(drift_profile(chain, *local, distance)[level]);
  }
  const RealChain chain = build_level_chain<Real>(bench, alg);
  return ExactValue(drift_profile(chain, *local, distance)[level]);
}

BoundReport make_lower_bound(std::string name, int n, int m, std::string p, ExactValue value,
                             ExactValue compared_to) {
  BoundReport r{std::move(name), n, m, std::move(p), value, compared_to, BoundDirection::LowerBound, {}, 0.0};
  r.satisfied = compare(compared_to, value) >= 0;
  r.ratio = compared_to.is_infinite() ? std::numeric_limits<double>::infinity()
                                      : static_cast<double>(compared_to.real() / value.real());
  return r;
}

BoundReport make_upper_comparator(std::string name, int n, int m, std::string p, ExactValue value,
                                  ExactValue compared_to) {
  BoundReport r{std::move(name), n, m, std::move(p), value, compared_to, BoundDirection::UpperBoundUpToConstant,
                std::nullopt, 0.0};
  r.ratio = compared_to.is_infinite() ? std::numeric_limits<double>::infinity()
                                      : static_cast<double>(compared_to.real() / value.real());
  return r;
}

std::vector<BoundReport> jump_bound_reports(int n, int m, const ParamExpr& p) {
  const BenchmarkSpec bench = BenchmarkSpec::jump(n, m);
  const ParamValue pv = p.resolve(bench);
  const std::string p_text = pv.approx.str(17);
  const ExactValue last_step =
      pv.exact ? last_step_formula<Rational>(n, m, *pv.exact) : last_step_formula<Real>(n, m, pv.approx);

  std::vector<BoundReport> out;
  if (n - 2 * m + 1 >= 0) {
    const SmallMBound small = lower_bound_small_m(n, m);
    out.push_back(make_lower_bound("small_m_binomial", n, m, p_text, ExactValue(Rational(small.binomial)),
                                   last_step));
    out.push_back(make_lower_bound("small_m_exp_comparator", n, m, p_text, ExactValue(small.exp_corrected),
                                   last_step));
  }
  out.push_back(make_lower_bound("linear_m_binomial", n, m, p_text,
                                 ExactValue(Rational(binomial(static_cast<unsigned>(n),
                                                              static_cast<unsigned>(n - m)))),
                                 last_step));

  const ResolvedAlgorithm classic = resolve(AlgorithmSpec::mahh(ParamExpr::m_over_n()), bench);
  out.push_back(make_upper_comparator("classic_upper", n, m, classic.p.approx.str(17),
                                      ExactValue(upper_bound_classic(n, m)),
                                      expected_runtime_exact(bench, classic, UniformRandomInit{})));
  const ResolvedAlgorithm global = resolve(AlgorithmSpec::mahh_global(ParamExpr::m_over_eight_e_n()), bench);
  out.push_back(make_upper_comparator("global_upper", n, m, global.p.approx.str(17),
                                      ExactValue(upper_bound_global(n, m).value),
                                      expected_runtime_exact(bench, global, UniformRandomInit{})));
  return out;
}

void write_bound_reports_csv(std::ostream& os, const std::vector<BoundReport>& reports, bool header) {
  if (header) os << "bound_name,n,m,p,value,exact,satisfied,ratio\n";
  for (const BoundReport& r : reports) {
    os << r.name << ',' << r.n << ',' << r.m << ',' << r.p << ',' << r.value.to_string(false, 17) << ','
       << r.compared_to.to_string(false, 17) << ',' << (r.satisfied ? (*r.satisfied ? "true" : "false") : "na")
       << ',' << ExactValue(Real(r.ratio)).to_string(false, 10) << '\n';
  }
}

template ExactValue last_step_formula<Rational>(int, int, const Rational&);
template ExactValue last_step_formula<Real>(int, int, const Real&);
template ExactValue ratio_pk<Rational>(int, int, int, const Rational&);
template ExactValue ratio_pk<Real>(int, int, int, const Real&);
template Rational path_probability<Rational>(int, int, const Rational&);
template Real path_probability<Real>(int, int, const Real&);
template Rational Distance::operator()<Rational>(int, int) const;
template Real Distance::operator()<Real>(int, int) const;
template std::vector<Rational> drift_profile<Rational>(const LevelChain<Rational>&, int, const Distance&);
template std::vector<Real> drift_profile<Real>(const LevelChain<Real>&, int, const Distance&);

}  // namespace mahh
