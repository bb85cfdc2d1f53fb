// Copyright 2026 The spanlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "spanlift/error.hpp"

namespace spanlift {

// Exact rational on int64 with 128-bit intermediates. Every operation that
// could overflow returns nullopt through the checked_* API; callers decide
// whether overflow is an error or triggers rounding.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;  // > 0, gcd(|num|, den) == 1

  Rat() = default;
  Rat(std::int64_t n) : num(n), den(1) {}
  Rat(std::int64_t n, std::int64_t d) {
    auto r = make(n, d);
    if (!r) fail(Err::kInvalidParam, "rational overflow in construction");
    *this = *r;
  }

  static std::optional<Rat> make(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 g = gcd128(a, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    const __int128 kMax = std::numeric_limits<std::int64_t>::max();
    const __int128 kMin = std::numeric_limits<std::int64_t>::min();
    if (n > kMax || n < kMin || d > kMax) return std::nullopt;
    Rat r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  bool is_zero() const { return num == 0; }
  bool is_integer() const { return den == 1; }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  // Exact conversion of a finite double (always a dyadic rational). Fails if
  // the reduced form does not fit in int64.
  static std::optional<Rat> from_double(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    if (x == 0.0) return Rat(0);
    int exp = 0;
    double f = std::frexp(x, &exp);  // x = f * 2^exp, |f| in [0.5, 1)
    auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
    int e2 = exp - 53;
    while (m != 0 && (m & 1) == 0) {
      m >>= 1;
      ++e2;
    }
    if (e2 >= 0) {
      if (e2 > 62) return std::nullopt;
      return make(static_cast<__int128>(m) << e2, 1);
    }
    if (-e2 > 62) return std::nullopt;
    return make(m, static_cast<__int128>(1) << (-e2));
  }

  // Parses "123", "-4.75", "1/3". Decimal forms are exact base-10 rationals.
  static std::optional<Rat> parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      auto a = parse_int(s.substr(0, slash));
      auto b = parse_int(s.substr(slash + 1));
      if (!a || !b || *b == 0) return std::nullopt;
      return make(*a, *b);
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    __int128 whole = 0, frac = 0, scale = 1;
    bool any = false, dot = false;
    for (; i < s.size(); ++i) {
      char c = s[i];
      if (c == '.') {
        if (dot) return std::nullopt;
        dot = true;
        continue;
      }
      if (c < '0' || c > '9') return std::nullopt;
      any = true;
      if (!dot) {
        whole = whole * 10 + (c - '0');
        if (whole > (__int128(1) << 100)) return std::nullopt;
      } else {
        if (scale > (__int128(1) << 100)) return std::nullopt;
        frac = frac * 10 + (c - '0');
        scale *= 10;
      }
    }
    if (!any) return std::nullopt;
    __int128 n = whole * scale + frac;
    if (neg) n = -n;
    return make(n, scale);
  }

  std::string to_string() const {
    std::string s = std::to_string(num);
    if (den != 1) s += "/" + std::to_string(den);
    return s;
  }

 private:
  static std::optional<std::int64_t> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos != s.size()) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  }
};

inline std::optional<Rat> checked_add(const Rat& a, const Rat& b) {
  return Rat::make(static_cast<__int128>(a.num) * b.den +
                       static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rat> checked_sub(const Rat& a, const Rat& b) {
  return Rat::make(static_cast<__int128>(a.num) * b.den -
                       static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rat> checked_mul(const Rat& a, const Rat& b) {
  return Rat::make(static_cast<__int128>(a.num) * b.num,
                   static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rat> checked_div(const Rat& a, const Rat& b) {
  if (b.num == 0) return std::nullopt;
  return Rat::make(static_cast<__int128>(a.num) * b.den,
                   static_cast<__int128>(a.den) * b.num);
}

inline int compare(const Rat& a, const Rat& b) {
  __int128 l = static_cast<__int128>(a.num) * b.den;
  __int128 r = static_cast<__int128>(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}
inline bool operator==(const Rat& a, const Rat& b) {
  return a.num == b.num && a.den == b.den;
}
inline bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
inline bool operator<(const Rat& a, const Rat& b) { return compare(a, b) < 0; }
inline bool operator<=(const Rat& a, const Rat& b) { return compare(a, b) <= 0; }
inline bool operator>(const Rat& a, const Rat& b) { return compare(a, b) > 0; }
inline bool operator>=(const Rat& a, const Rat& b) { return compare(a, b) >= 0; }

inline Rat rat_neg(const Rat& a) {
  Rat r;
  r.num = -a.num;
  r.den = a.den;
  return r;
}
inline Rat rat_abs(const Rat& a) { return a.num < 0 ? rat_neg(a) : a; }

// Rounds to the nearest multiple of quantum (ties toward +inf); used as the
// fallback when exact arithmetic overflows int64.
inline Rat round_to_quantum(double x, const Rat& quantum) {
  double q = quantum.to_double();
  double k = std::floor(x / q + 0.5);
  auto kr = Rat::from_double(k);
  if (!kr) fail(Err::kInvalidParam, "value out of representable range");
  auto r = checked_mul(*kr, quantum);
  if (!r) fail(Err::kInvalidParam, "value out of representable range");
  return *r;
}

}  // namespace spanlift
