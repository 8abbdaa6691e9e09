#include "mahh/numeric.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace mahh {

std::string_view to_string(Backend backend) {
  return backend == Backend::Rational ? "rational" : "logfloat";
}

ExactValue ExactValue::infinity(Backend backend) {
  ExactValue v = backend == Backend::Rational ? ExactValue(Rational(0)) : ExactValue(Real(0));
  v.infinite_ = true;
  return v;
}

const Rational& ExactValue::rational() const {
  if (infinite_) throw DomainError("value is infinite");
  if (!is_rational()) throw DomainError("value is not backed by an exact rational");
  return std::get<Rational>(value_);
}

Real ExactValue::real() const {
  if (infinite_) return std::numeric_limits<Real>::infinity();
  if (is_rational()) return Real(std::get<Rational>(value_));
  return std::get<Real>(value_);
}

double ExactValue::to_double() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  if (is_rational()) return static_cast<double>(std::get<Rational>(value_));
  return static_cast<double>(std::get<Real>(value_));
}

std::string ExactValue::to_string(bool fraction, int digits) const {
  if (infinite_) return "inf";
  if (is_rational() && fraction) {
    const Rational& q = std::get<Rational>(value_);
    if (mp::denominator(q) == 1) return mp::numerator(q).str();
    return mp::numerator(q).str() + "/" + mp::denominator(q).str();
  }
  return real().str(digits);
}

int compare(const ExactValue& a, const ExactValue& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return 0;
    return a.is_infinite() ? 1 : -1;
  }
  if (a.is_rational() && b.is_rational()) {
    const int c = a.rational().compare(b.rational());
    return (c > 0) - (c < 0);
  }
  const Real x = a.real();
  const Real y = b.real();
  return (x > y) - (x < y);
}

bool operator==(const ExactValue& a, const ExactValue& b) { return compare(a, b) == 0; }

double relative_difference(const ExactValue& a, const ExactValue& b) {
  if (a.is_infinite() || b.is_infinite()) {
    return a.is_infinite() == b.is_infinite() ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const Real x = a.real();
  const Real y = b.real();
  const Real ax = mp::abs(x);
  const Real ay = mp::abs(y);
  const Real scale = ax < ay ? ay : ax;
  if (scale == 0) return 0.0;
  return static_cast<double>(mp::abs(x - y) / scale);
}

ParamValue ParamValue::from_rational(const Rational& q) { return ParamValue{q, Real(q)}; }

ParamValue ParamValue::from_real(const Real& r) { return ParamValue{std::nullopt, r}; }

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> DomainError {
    return DomainError("not a number: '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  Integer mantissa = 0;
  long scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_point) --scale;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') throw fail();
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    long exponent = 0;
    bool exp_digit = false;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw fail();
      exponent = exponent * 10 + (text[i] - '0');
      exp_digit = true;
      if (exponent > 100000) throw fail();
    }
    if (!exp_digit) throw fail();
    scale += exp_negative ? -exponent : exponent;
  }
  Rational value(mantissa);
  value *= integer_power(Rational(10), scale);
  return negative ? Rational(-value) : value;
}

Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer result;
  mpz_bin_uiui(result.backend().data(), n, k);
  return result;
}

Real real_e() {
  static const Real e = mp::exp(Real(1));
  return e;
}

}  // namespace mahh
