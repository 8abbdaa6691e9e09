#pragma once

#include "mahh/numeric.hpp"

#include <charconv>
#include <map>
#include <string>
#include <string_view>

namespace mahh::detail {

struct SpecString {
  std::string name;
  std::map<std::string, std::string> params;
};

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

/// Splits `name:k1=v1,k2=v2` at top-level commas (commas inside parentheses
/// belong to the value).
inline SpecString split_spec(std::string_view text) {
  SpecString out;
  const auto colon = text.find(':');
  out.name = trim(text.substr(0, colon));
  if (out.name.empty()) throw DomainError("empty spec string");
  if (colon == std::string_view::npos) return out;

  const std::string_view rest = text.substr(colon + 1);
  int depth = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    const std::string item = trim(rest.substr(start, end - start));
    if (item.empty()) return;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw DomainError("expected key=value in '" + std::string(text) + "', got '" + item + "'");
    }
    const std::string key = trim(std::string_view(item).substr(0, eq));
    if (out.params.contains(key)) {
      throw DomainError("duplicate key '" + key + "' in '" + std::string(text) + "'");
    }
    out.params[key] = trim(std::string_view(item).substr(eq + 1));
  };
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '(') ++depth;
    if (rest[i] == ')') --depth;
    if (rest[i] == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(rest.size());
  return out;
}

inline int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(std::string(what) + " must be an integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace mahh::detail
