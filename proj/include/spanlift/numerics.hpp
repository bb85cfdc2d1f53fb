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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "spanlift/error.hpp"

namespace spanlift {

// Extended reals [-inf, +inf] as a closed, totally ordered domain.
// Addition follows the convention inf + (-inf) = -inf: the divergence sums
// this type exists for are lower envelopes, so -inf absorbs.
class ExtReal {
 public:
  ExtReal() : v_(0.0) {}
  ExtReal(double v) : v_(v) {
    if (std::isnan(v)) fail(Err::kInvalidParam, "NaN is not an extended real");
  }

  static ExtReal pos_inf() {
    return ExtReal(std::numeric_limits<double>::infinity());
  }
  static ExtReal neg_inf() {
    return ExtReal(-std::numeric_limits<double>::infinity());
  }

  bool is_pos_inf() const { return std::isinf(v_) && v_ > 0; }
  bool is_neg_inf() const { return std::isinf(v_) && v_ < 0; }
  bool is_finite() const { return std::isfinite(v_); }

  // Finite value accessor; rejects infinities.
  double value() const {
    if (!is_finite()) fail(Err::kInvalidParam, "extended real is infinite");
    return v_;
  }
  // IEEE embedding (+-inf map to IEEE infinities).
  double to_double() const { return v_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
    if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
    return ExtReal(a.v_ + b.v_);
  }
  friend ExtReal operator-(ExtReal a) { return ExtReal(-a.v_); }
  friend ExtReal operator*(double s, ExtReal a) {
    if (s == 0.0) return ExtReal(0.0);  // 0 * inf = 0 (mass-weighted sums)
    if (a.is_finite()) return ExtReal(s * a.v_);
    return (s > 0) == a.is_pos_inf() ? pos_inf() : neg_inf();
  }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
  friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
  friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }

 private:
  double v_;
};

// Sum respecting the -inf-absorbs convention; order independent.
inline ExtReal ext_sum(const std::vector<ExtReal>& xs) {
  bool pos = false;
  double acc = 0;
  for (const auto& x : xs) {
    if (x.is_neg_inf()) return ExtReal::neg_inf();
    if (x.is_pos_inf()) {
      pos = true;
    } else {
      acc += x.value();
    }
  }
  return pos ? ExtReal::pos_inf() : ExtReal(acc);
}

// Weight function f : [0, inf) -> extended reals defining an f-divergence.
// Registered families carry their analytic perspective limit at q = 0;
// custom weights fall back to a numeric limit along t_k = 2^-k.
class WeightFn {
 public:
  enum class Family { kDp, kRenyi, kCustom };

  // f(t) = max(0, 1 - e^eps * t); the hockey-stick weight.
  static WeightFn dp(double eps) {
    if (!(eps >= 0) || !std::isfinite(eps))
      fail(Err::kInvalidParam, "dp weight requires eps >= 0");
    WeightFn w;
    w.family_ = Family::kDp;
    w.param_ = eps;
    return w;
  }

  // f(t) = t^alpha for alpha > 1; the Renyi moment weight.
  static WeightFn renyi(double alpha) {
    if (!(alpha > 1) || !std::isfinite(alpha))
      fail(Err::kInvalidParam, "renyi weight requires alpha > 1");
    WeightFn w;
    w.family_ = Family::kRenyi;
    w.param_ = alpha;
    return w;
  }

  static WeightFn custom(std::function<double(double)> f) {
    if (!f) fail(Err::kInvalidParam, "custom weight needs a function");
    WeightFn w;
    w.family_ = Family::kCustom;
    w.fn_ = std::move(f);
    return w;
  }

  Family family() const { return family_; }
  double param() const { return param_; }

  double operator()(double t) const {
    if (!(t >= 0)) fail(Err::kInvalidParam, "weight argument must be >= 0");
    switch (family_) {
      case Family::kDp:
        return std::max(0.0, 1.0 - std::exp(param_) * t);
      case Family::kRenyi:
        return std::pow(t, param_);
      case Family::kCustom:
        return fn_(t);
    }
    return 0;
  }

 private:
  WeightFn() = default;
  Family family_ = Family::kCustom;
  double param_ = 0;
  std::function<double(double)> fn_;
};

// perspective(q, p, f) = q * f(p/q), extended by continuity:
//   q > 0          : q * f(p/q)
//   q = 0, p = 0   : 0
//   q = 0, p > 0   : lim_{t->0+} t * f(p/t)
// The limit is analytic for the registered families (0 for dp, +inf for
// renyi) and numeric for custom weights: t_k = 2^-k for k = 1..60, accepted
// once successive values differ by < 1e-10, else NUMERIC_LIMIT_DIVERGED.
inline ExtReal perspective(double q, double p, const WeightFn& f) {
  if (!(q >= 0) || !(p >= 0) || !std::isfinite(q) || !std::isfinite(p))
    fail(Err::kInvalidParam, "perspective needs finite masses >= 0");
  if (q > 0) {
    double v = q * f(p / q);
    if (std::isnan(v)) fail(Err::kInvalidParam, "weight produced NaN");
    return ExtReal(v);
  }
  if (p == 0) return ExtReal(0.0);
  switch (f.family()) {
    case WeightFn::Family::kDp:
      return ExtReal(0.0);
    case WeightFn::Family::kRenyi:
      return ExtReal::pos_inf();
    case WeightFn::Family::kCustom: {
      double prev = std::numeric_limits<double>::quiet_NaN();
      for (int k = 1; k <= 60; ++k) {
        double t = std::ldexp(1.0, -k);
        double v = t * f(p / t);
        if (std::isinf(v)) return ExtReal(v);
        if (k > 1 && std::abs(v - prev) < 1e-10) return ExtReal(v);
        prev = v;
      }
      fail(Err::kNumericLimitDiverged,
           "perspective limit did not converge at q = 0");
    }
  }
  return ExtReal(0.0);
}

// log(sum_i exp(m_i)) with -inf entries allowed; returns -inf on empty input.
inline double logsumexp(const std::vector<double>& m) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : m) mx = std::max(mx, x);
  if (std::isinf(mx) && mx < 0) return mx;
  double s = 0;
  for (double x : m) s += std::exp(x - mx);
  return mx + std::log(s);
}

struct MaxResult {
  double x = 0;
  double fx = 0;
};

// Golden-section search for a maximum of f on [lo, hi], run until the
// bracket width drops below xtol. Returns the best point seen, including
// the endpoints.
template <typename F>
MaxResult golden_section_max(F&& f, double lo, double hi, double xtol) {
  const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  int guard = 0;
  while (b - a > xtol && ++guard < 400) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  MaxResult best{c, fc};
  if (fd > best.fx) best = {d, fd};
  double flo = f(lo), fhi = f(hi);
  if (flo > best.fx) best = {lo, flo};
  if (fhi > best.fx) best = {hi, fhi};
  return best;
}

}  // namespace spanlift
