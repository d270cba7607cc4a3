#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

// Boost 1.74 compares rational with integer through a template that C++20
// rewrites into itself. These exact overloads win overload resolution.
namespace boost {
inline constexpr bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline constexpr bool operator==(const rational<std::int64_t>& a, long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline constexpr bool operator==(const rational<std::int64_t>& a, long long b) {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace autdrift {

using Rational = boost::rational<std::int64_t>;

inline std::string format_exact(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Integers print as integers (so an exact zero prints as "0"); everything
// else with six decimals.
inline std::string format_decimal(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", boost::rational_cast<double>(r));
  return buf;
}

inline std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline Rational abs(const Rational& r) { return r < 0 ? -r : r; }

}  // namespace autdrift
