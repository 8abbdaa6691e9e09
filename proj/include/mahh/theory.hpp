#pragma once

#include "mahh/benchmarks.hpp"
#include "mahh/chain.hpp"
#include "mahh/heuristics.hpp"
#include "mahh/numeric.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mahh {

/// Expected time for MAHH on Jump_m to go from level n-1 to the optimum:
/// p^(n-2m+1) sum_{k<n-m} p^-k C(n,k) + p^(1-n) sum_{k=n-m}^{n-1} C(n,k) p^k.
/// Infinite for p = 0.
template <class S>
ExactValue last_step_formula(int n, int m, const S& p);

/// p_k^- / p_k^+ of MAHH on Jump_m, by the four-case count of improving and
/// worsening one-bit flips. Infinite inside the valley when p = 0.
template <class S>
ExactValue ratio_pk(int k, int n, int m, const S& p);

/// The finite-n pieces behind the small-m lower bound, with k = 2m-1:
/// C(n, n-k) >= n^k (1-(k-1)/n)^k / k!, and the exponential comparator
/// n^k/k! * exp(-k(k-1)/n).
struct SmallMBound {
  int n = 0;
  int m = 0;
  Integer binomial;        // C(n, n-2m+1), the certified bound on E[T_{n-1}^+]
  Real asymptotic;         // n^(2m-1) / (2m-1)!
  Real product_form;       // n^(2m-1) (1 - (2m-2)/n)^(2m-1) / (2m-1)!
  Real exp_corrected;      // asymptotic * exp(-(2m-1)(2m-2)/n)
};
SmallMBound lower_bound_small_m(int n, int m);

/// Growth base of C(n, alpha n): 1 / (alpha^alpha (1-alpha)^(1-alpha)).
Real kappa(const Real& alpha);

struct LinearMBound {
  int n = 0;
  int m = 0;           // round(alpha n)
  Integer binomial;    // C(n, n-m)
  Real kappa;
};
LinearMBound lower_bound_linear_m(int n, const Real& alpha);

/// n ln n + n^(2m-1) / (m! m^(m-2)); a magnitude, no constant implied.
Real upper_bound_classic(int n, int m);

struct GlobalUpperBound {
  Real value;          // n ln n + m * min(ea_branch, mahh_branch)
  Real ea_branch;      // e n^m
  Real mahh_branch;    // 8^(m-1) (en)^(2m-1) / (m! m^(m-1))
  bool ea_branch_wins = false;
};
GlobalUpperBound upper_bound_global(int n, int m);

/// m! p^(m-1) / n^m: probability of crossing the valley by m consecutive
/// upward flips from the local optimum.
template <class S>
S path_probability(int n, int m, const S& p);

/// Distance to the local optimum. Absolute is |loc - level|; PotentialAlpha
/// weighs the side above the local optimum by alpha.
struct Distance {
  enum class Kind { Absolute, PotentialAlpha };
  Kind kind = Kind::Absolute;
  Rational alpha = 1;

  static Distance absolute() { return {}; }
  static Distance potential(const Rational& alpha) { return {Kind::PotentialAlpha, alpha}; }

  template <class S>
  S operator()(int level, int local_optimum) const;
};

/// E[d(X_t) - d(X_{t+1}) | level] for every level, from the chain rows.
template <class S>
std::vector<S> drift_profile(const LevelChain<S>& chain, int local_optimum, const Distance& distance);

ExactValue drift_onestep(const BenchmarkSpec& bench, const ResolvedAlgorithm& alg, int level,
                         const Distance& distance);

enum class BoundDirection { LowerBound, UpperBoundUpToConstant };

struct BoundReport {
  std::string name;
  int n = 0;
  int m = 0;
  std::string p;
  ExactValue value;
  ExactValue compared_to;
  BoundDirection direction = BoundDirection::LowerBound;
  std::optional<bool> satisfied;  // empty for up-to-constant comparisons
  double ratio = 0.0;             // compared_to / value
};

BoundReport make_lower_bound(std::string name, int n, int m, std::string p, ExactValue value,
                             ExactValue compared_to);
BoundReport make_upper_comparator(std::string name, int n, int m, std::string p, ExactValue value,
                                  ExactValue compared_to);

/// Every bound that applies to Jump_m at dimension n, with the last step of
/// MAHH evaluated at `p`.
std::vector<BoundReport> jump_bound_reports(int n, int m, const ParamExpr& p);

void write_bound_reports_csv(std::ostream& os, const std::vector<BoundReport>& reports, bool header = true);

}  // namespace mahh
