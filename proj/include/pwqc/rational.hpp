#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "pwqc/error.hpp"

namespace pwqc {

using Rational = boost::rational<std::int64_t>;

// Renders r with exactly `digits` fractional digits, rounding half to even.
inline std::string to_decimal(const Rational& r, int digits = 6) {
  __int128 scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  __int128 num = r.numerator();
  const __int128 den = r.denominator();  // always positive
  const bool negative = num < 0;
  if (negative) num = -num;

  __int128 scaled = num * scale;
  __int128 q = scaled / den;
  const __int128 rem = scaled % den;
  if (2 * rem > den || (2 * rem == den && q % 2 == 1)) ++q;

  const auto int_part = static_cast<std::int64_t>(q / scale);
  auto frac = static_cast<std::int64_t>(q % scale);
  std::string out = (negative && q != 0) ? "-" : "";
  out += std::to_string(int_part);
  if (digits > 0) {
    std::string f = std::to_string(frac);
    out += '.';
    out += std::string(static_cast<std::size_t>(digits) - f.size(), '0');
    out += f;
  }
  return out;
}

// Parses "1", "0.95", "-2.5" into an exact rational.
inline Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw InputError("empty decimal");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw InputError("not a decimal: " + std::string(text));
    if (num > (INT64_MAX - 9) / 10 || (seen_point && den > INT64_MAX / 10))
      throw InputError("decimal out of range: " + std::string(text));
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
    seen_digit = true;
  }
  if (!seen_digit) throw InputError("not a decimal: " + std::string(text));
  return Rational(negative ? -num : num, den);
}

}  // namespace pwqc
