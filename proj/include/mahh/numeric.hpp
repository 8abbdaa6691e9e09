#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace mahh {

namespace mp = boost::multiprecision;

using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;
// 40 decimal digits is ~133 bits of mantissa. MPFR's exponent range is large
// enough that terms like C(n,k) * p^(1-n) never overflow in the supported range.
using Real = mp::number<mp::mpfr_float_backend<40, mp::allocate_stack>, mp::et_off>;

/// Raised for inputs outside an operation's domain (bad level, bad parameter).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is called with the wrong algorithm kind or a
/// precondition that is the caller's responsibility.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Backend { Rational, LogFloat };

std::string_view to_string(Backend backend);

/// A number produced by the exact engine: either an exact rational or a
/// high-precision float, or a distinguished infinity.
class ExactValue {
 public:
  ExactValue() : value_(Rational(0)) {}
  ExactValue(Rational value) : value_(std::move(value)) {}
  ExactValue(Real value) : value_(std::move(value)) {}

  static ExactValue infinity(Backend backend);

  Backend backend() const {
    return std::holds_alternative<Rational>(value_) ? Backend::Rational : Backend::LogFloat;
  }
  bool is_infinite() const { return infinite_; }
  bool is_rational() const { return backend() == Backend::Rational; }

  /// Exact rational value; throws if infinite or float-backed.
  const Rational& rational() const;
  /// Value as a high-precision float (+inf for infinity).
  Real real() const;
  double to_double() const;
  /// Decimal rendering, or `num/den` for rationals when `fraction` is set.
  std::string to_string(bool fraction = false, int digits = 17) const;

 private:
  std::variant<Rational, Real> value_;
  bool infinite_ = false;
};

/// Three-way comparison that works across backends (rationals are compared
/// exactly with each other, otherwise via Real).
int compare(const ExactValue& a, const ExactValue& b);
bool operator==(const ExactValue& a, const ExactValue& b);

/// Relative difference |a-b| / max(|a|,|b|), 0 when both are zero or both infinite.
double relative_difference(const ExactValue& a, const ExactValue& b);

/// A resolved real parameter: always has a float value, and an exact rational
/// when the expression that produced it is rational (e.g. m/n but not m/(8en)).
struct ParamValue {
  std::optional<Rational> exact;
  Real approx;

  static ParamValue from_rational(const Rational& q);
  static ParamValue from_real(const Real& r);
  double to_double() const { return static_cast<double>(approx); }
};

/// Parses `0.25`, `1e-3`, `3/8`, `-2` into an exact rational.
Rational parse_rational(std::string_view text);

Integer binomial(unsigned n, unsigned k);
Real real_e();

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr Backend backend = Backend::Rational;
  static Rational from_param(const ParamValue& v) {
    if (!v.exact) {
      throw DomainError("parameter is irrational; the Rational backend cannot represent it");
    }
    return *v.exact;
  }
  static Rational from_rational(const Rational& q) { return q; }
  static Rational from_integer(const Integer& z) { return Rational(z); }
};

template <>
struct ScalarTraits<Real> {
  static constexpr Backend backend = Backend::LogFloat;
  static Real from_param(const ParamValue& v) { return v.approx; }
  static Real from_rational(const Rational& q) { return Real(q); }
  static Real from_integer(const Integer& z) { return Real(z); }
};

template <class S>
S integer_power(const S& base, long exponent) {
  if (exponent < 0) {
    return S(1) / integer_power(base, -exponent);
  }
  S result(1);
  S b = base;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e != 0) {
    if (e & 1UL) result *= b;
    e >>= 1;
    if (e != 0) b *= b;
  }
  return result;
}

}  // namespace mahh
