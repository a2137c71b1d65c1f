#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirdiff {

/// Shortest text that parses back to exactly `x` (17 significant digits).
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Compact form for messages (6 significant digits).
inline std::string format_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Strict full-string parse of a real number.
inline double parse_real(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  const auto last = text.find_last_not_of(" \t");
  if (first == std::string_view::npos) throw std::invalid_argument("expected a number, got empty text");
  text = text.substr(first, last - first + 1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

/// Family name plus named numeric parameters, e.g. "sinusoidal:a=0.5,b=1,c=1".
/// Text form round-trips bit-exactly.
struct Descriptor {
  std::string family;
  std::vector<std::pair<std::string, double>> params;

  bool has(std::string_view key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return true;
    }
    return false;
  }

  double get(std::string_view key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    throw std::invalid_argument("descriptor '" + family + "' lacks parameter '" + std::string(key) + "'");
  }

  double get_or(std::string_view key, double fallback) const { return has(key) ? get(key) : fallback; }

  std::string to_string() const {
    std::string out = family;
    for (std::size_t i = 0; i < params.size(); ++i) {
      out += (i == 0) ? ':' : ',';
      out += params[i].first;
      out += '=';
      out += format_real(params[i].second);
    }
    return out;
  }

  static Descriptor parse(std::string_view text) {
    auto is_name_char = [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    };
    Descriptor d;
    const auto colon = text.find(':');
    d.family = std::string(text.substr(0, colon));
    if (d.family.empty()) throw std::invalid_argument("descriptor has an empty family name");
    for (char c : d.family) {
      if (!is_name_char(c)) throw std::invalid_argument("bad family name in descriptor '" + std::string(text) + "'");
    }
    if (colon == std::string_view::npos) return d;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        throw std::invalid_argument("descriptor parameter must be key=value, got '" + std::string(item) + "'");
      }
      std::string key(item.substr(0, eq));
      for (char c : key) {
        if (!is_name_char(c)) throw std::invalid_argument("bad parameter name '" + key + "'");
      }
      if (d.has(key)) throw std::invalid_argument("duplicate descriptor parameter '" + key + "'");
      d.params.emplace_back(std::move(key), parse_real(item.substr(eq + 1)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
      if (rest.empty()) throw std::invalid_argument("trailing comma in descriptor");
    }
    return d;
  }

  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

}  // namespace dirdiff
