#include "mahh/benchmarks.hpp"

#include "spec_parsing.hpp"

#include <algorithm>

namespace mahh {

BenchmarkSpec BenchmarkSpec::onemax(int n) {
  BenchmarkSpec s{BenchmarkKind::OneMax, n, 0};
  s.validate();
  return s;
}

BenchmarkSpec BenchmarkSpec::cliff(int n, int d) {
  BenchmarkSpec s{BenchmarkKind::Cliff, n, d};
  s.validate();
  return s;
}

BenchmarkSpec BenchmarkSpec::jump(int n, int m) {
  BenchmarkSpec s{BenchmarkKind::Jump, n, m};
  s.validate();
  return s;
}

void BenchmarkSpec::validate() const {
  if (n < 1) throw DomainError("dimension n must be positive, got " + std::to_string(n));
  switch (kind) {
    case BenchmarkKind::OneMax:
      break;
    case BenchmarkKind::Cliff:
      if (param < 1 || 2 * param > n) {
        throw DomainError("cliff width d must satisfy 1 <= d <= n/2, got d=" + std::to_string(param) +
                          " for n=" + std::to_string(n));
      }
      break;
    case BenchmarkKind::Jump:
      if (param < 2 || param > n) {
        throw DomainError("jump size m must satisfy 2 <= m <= n, got m=" + std::to_string(param) +
                          " for n=" + std::to_string(n));
      }
      break;
  }
}

BenchmarkSpec BenchmarkSpec::with_dimension(int new_n) const {
  BenchmarkSpec s = *this;
  s.n = new_n;
  s.validate();
  return s;
}

Fitness level_fitness(const BenchmarkSpec& spec, int level) {
  spec.validate();
  if (level < 0 || level > spec.n) {
    throw DomainError("level " + std::to_string(level) + " outside [0, " + std::to_string(spec.n) + "]");
  }
  const std::int64_t n = spec.n;
  const std::int64_t l = level;
  const std::int64_t k = spec.param;
  switch (spec.kind) {
    case BenchmarkKind::OneMax:
      return Fitness::from_integer(l);
    case BenchmarkKind::Cliff:
      // l - d + 1/2, doubled
      return l <= n - k ? Fitness::from_integer(l) : Fitness::from_twice(2 * l - 2 * k + 1);
    case BenchmarkKind::Jump:
      if (l == n) return Fitness::from_integer(n + k);
      if (l <= n - k) return Fitness::from_integer(k + l);
      return Fitness::from_integer(n - l);
  }
  throw ContractViolation("unknown benchmark kind");
}

int popcount(std::span<const std::uint8_t> x) {
  return static_cast<int>(std::count_if(x.begin(), x.end(), [](std::uint8_t b) { return b != 0; }));
}

Fitness evaluate(const BenchmarkSpec& spec, std::span<const std::uint8_t> x) {
  if (static_cast<int>(x.size()) != spec.n) {
    throw DomainError("bit string has length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(spec.n));
  }
  return level_fitness(spec, popcount(x));
}

int global_optimum_level(const BenchmarkSpec& spec) {
  spec.validate();
  return spec.n;
}

std::optional<int> local_optimum_level(const BenchmarkSpec& spec) {
  switch (spec.kind) {
    case BenchmarkKind::OneMax:
      return std::nullopt;
    case BenchmarkKind::Cliff:
    case BenchmarkKind::Jump:
      return spec.n - spec.param;
  }
  return std::nullopt;
}

std::string_view kind_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::OneMax:
      return "onemax";
    case BenchmarkKind::Cliff:
      return "cliff";
    case BenchmarkKind::Jump:
      return "jump";
  }
  return "?";
}

BenchmarkSpec parse_benchmark(std::string_view text) {
  const detail::SpecString parsed = detail::split_spec(text);
  auto require_int = [&](const std::string& key) {
    auto it = parsed.params.find(key);
    if (it == parsed.params.end()) {
      throw DomainError("benchmark '" + std::string(text) + "' is missing '" + key + "='");
    }
    return detail::parse_int(it->second, key);
  };
  auto reject_unknown = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : parsed.params) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw DomainError("unknown benchmark parameter '" + key + "' in '" + std::string(text) + "'");
      }
    }
  };

  if (parsed.name == "onemax") {
    reject_unknown({"n"});
    return BenchmarkSpec::onemax(require_int("n"));
  }
  if (parsed.name == "cliff") {
    reject_unknown({"n", "d"});
    return BenchmarkSpec::cliff(require_int("n"), require_int("d"));
  }
  if (parsed.name == "jump") {
    reject_unknown({"n", "m"});
    return BenchmarkSpec::jump(require_int("n"), require_int("m"));
  }
  throw DomainError("unknown benchmark '" + parsed.name + "' (expected onemax, cliff or jump)");
}

std::string to_string(const BenchmarkSpec& spec) {
  const std::string n = "n=" + std::to_string(spec.n);
  switch (spec.kind) {
    case BenchmarkKind::OneMax:
      return "onemax:" + n;
    case BenchmarkKind::Cliff:
      return "cliff:" + n + ",d=" + std::to_string(spec.param);
    case BenchmarkKind::Jump:
      return "jump:" + n + ",m=" + std::to_string(spec.param);
  }
  return "?";
}

}  // namespace mahh
