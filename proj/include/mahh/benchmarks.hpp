#pragma once

#include "mahh/numeric.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mahh {

enum class BenchmarkKind { OneMax, Cliff, Jump };

/// A fitness landscape on {0,1}^n. `param` is the cliff width d or the jump
/// size m; OneMax ignores it.
struct BenchmarkSpec {
  BenchmarkKind kind = BenchmarkKind::OneMax;
  int n = 1;
  int param = 0;

  static BenchmarkSpec onemax(int n);
  static BenchmarkSpec cliff(int n, int d);
  static BenchmarkSpec jump(int n, int m);

  /// Throws DomainError unless 1 <= d <= n/2 (Cliff) or 2 <= m <= n (Jump).
  void validate() const;
  /// Same landscape family and parameter at a different dimension.
  BenchmarkSpec with_dimension(int new_n) const;

  bool operator==(const BenchmarkSpec&) const = default;
};

/// Fitness values are stored doubled so Cliff's half-integer offset stays an
/// exact integer and comparisons never round.
class Fitness {
 public:
  constexpr Fitness() = default;
  static constexpr Fitness from_twice(std::int64_t twice) { return Fitness(twice); }
  static constexpr Fitness from_integer(std::int64_t value) { return Fitness(2 * value); }

  constexpr std::int64_t twice() const { return twice_; }
  Rational value() const { return Rational(twice_, 2); }
  double to_double() const { return static_cast<double>(twice_) / 2.0; }

  constexpr auto operator<=>(const Fitness&) const = default;

 private:
  constexpr explicit Fitness(std::int64_t twice) : twice_(twice) {}
  std::int64_t twice_ = 0;
};

using BitString = std::vector<std::uint8_t>;

Fitness level_fitness(const BenchmarkSpec& spec, int level);
Fitness evaluate(const BenchmarkSpec& spec, std::span<const std::uint8_t> x);
int global_optimum_level(const BenchmarkSpec& spec);
/// Level of the local optimum (n-m for Jump, n-d for Cliff); none for OneMax.
std::optional<int> local_optimum_level(const BenchmarkSpec& spec);

int popcount(std::span<const std::uint8_t> x);

/// `onemax:n=<n>`, `cliff:n=<n>,d=<d>`, `jump:n=<n>,m=<m>`.
BenchmarkSpec parse_benchmark(std::string_view text);
std::string to_string(const BenchmarkSpec& spec);
std::string_view kind_name(BenchmarkKind kind);

}  // namespace mahh
