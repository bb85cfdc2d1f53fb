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
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spanlift/error.hpp"
#include "spanlift/rational.hpp"

namespace spanlift {

// Discrete outcome universe: booleans, integers, exact rationals (reals are
// always grid-aligned rationals, never raw floats, so equality is exact),
// and finite tuples. Total order: type rank, then value.
class Outcome {
 public:
  using Tuple = std::vector<Outcome>;

  Outcome() : v_(false) {}
  static Outcome of_bool(bool b) { return Outcome(Val(b)); }
  static Outcome of_int(std::int64_t i) { return Outcome(Val(i)); }
  static Outcome of_real(Rat r) { return Outcome(Val(std::move(r))); }
  static Outcome of_tuple(Tuple t) { return Outcome(Val(std::move(t))); }

  bool is_bool() const { return v_.index() == 0; }
  bool is_int() const { return v_.index() == 1; }
  bool is_real() const { return v_.index() == 2; }
  bool is_tuple() const { return v_.index() == 3; }

  bool as_bool() const {
    require(is_bool(), "bool");
    return std::get<0>(v_);
  }
  std::int64_t as_int() const {
    require(is_int(), "int");
    return std::get<1>(v_);
  }
  const Rat& as_real() const {
    require(is_real(), "real");
    return std::get<2>(v_);
  }
  const Tuple& as_tuple() const {
    require(is_tuple(), "tuple");
    return std::get<3>(v_);
  }

  // Numeric view: ints widen to rationals.
  Rat as_rat() const {
    if (is_int()) return Rat(as_int());
    return as_real();
  }
  bool is_numeric() const { return is_int() || is_real(); }

  friend bool operator==(const Outcome& a, const Outcome& b) {
    return a.cmp(b) == 0;
  }
  friend bool operator!=(const Outcome& a, const Outcome& b) {
    return a.cmp(b) != 0;
  }
  friend bool operator<(const Outcome& a, const Outcome& b) {
    return a.cmp(b) < 0;
  }

  int cmp(const Outcome& o) const {
    if (v_.index() != o.v_.index())
      return v_.index() < o.v_.index() ? -1 : 1;
    switch (v_.index()) {
      case 0: {
        bool a = std::get<0>(v_), b = std::get<0>(o.v_);
        return a == b ? 0 : (a < b ? -1 : 1);
      }
      case 1: {
        auto a = std::get<1>(v_), b = std::get<1>(o.v_);
        return a == b ? 0 : (a < b ? -1 : 1);
      }
      case 2:
        return compare(std::get<2>(v_), std::get<2>(o.v_));
      default: {
        const auto& a = std::get<3>(v_);
        const auto& b = std::get<3>(o.v_);
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
          int c = a[i].cmp(b[i]);
          if (c != 0) return c;
        }
        return a.size() == b.size() ? 0 : (a.size() < b.size() ? -1 : 1);
      }
    }
  }

  std::string to_string() const {
    switch (v_.index()) {
      case 0: return as_bool() ? "true" : "false";
      case 1: return std::to_string(as_int());
      case 2: return as_real().to_string();
      default: {
        std::string s = "(";
        const auto& t = as_tuple();
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (i) s += ", ";
          s += t[i].to_string();
        }
        return s + ")";
      }
    }
  }

 private:
  using Val = std::variant<bool, std::int64_t, Rat, Tuple>;
  explicit Outcome(Val v) : v_(std::move(v)) {}
  void require(bool ok, const char* what) const {
    if (!ok) fail(Err::kShapeError, std::string("outcome is not ") + what);
  }
  Val v_;
};

// Masses below this threshold are pruned into numeric dust by the monad
// operations (bind, product, pushforward, marginal); construction keeps
// every strictly positive mass so that distributions built on a shared grid
// keep exactly aligned supports.
inline constexpr double kDustTol = 1e-15;
// Total-mass slack allowed over 1 before a distribution is rejected.
inline constexpr double kMassTol = 1e-9;

// Finitely supported subprobability measure. Canonical form: support sorted,
// unique, all masses > 0; mass lost to pruning is tracked in dust().
class SubDist {
 public:
  using Entry = std::pair<Outcome, double>;

  SubDist() = default;

  // Canonicalizes: merges duplicates, drops exact zeros, validates masses.
  // Masses at or below prune_tol are removed and accumulated into dust.
  static SubDist from_entries(std::vector<Entry> entries, double dust = 0,
                              double prune_tol = 0) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    SubDist d;
    d.dust_ = dust;
    double total = 0;
    for (auto& [o, m] : entries) {
      if (!(m >= 0) || !std::isfinite(m))
        fail(Err::kInvalidParam, "masses must be finite and >= 0");
      if (!d.entries_.empty() && d.entries_.back().first == o) {
        d.entries_.back().second += m;
      } else {
        d.entries_.emplace_back(std::move(o), m);
      }
    }
    std::vector<Entry> kept;
    kept.reserve(d.entries_.size());
    for (auto& e : d.entries_) {
      total += e.second;
      if (e.second <= prune_tol) {
        d.dust_ += e.second;
      } else if (e.second > 0) {
        kept.push_back(std::move(e));
      }
    }
    if (total > 1.0 + kMassTol)
      fail(Err::kInvalidParam, "total mass exceeds 1");
    d.entries_ = std::move(kept);
    return d;
  }

  static SubDist dirac(Outcome o) {
    return from_entries({{std::move(o), 1.0}});
  }

  // Copy with masses at or below tol moved into dust.
  SubDist pruned(double tol = kDustTol) const {
    return from_entries(entries_, dust_, tol);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  double dust() const { return dust_; }

  double total_mass() const {
    double t = 0;
    for (const auto& e : entries_) t += e.second;
    return t;
  }

  double mass(const Outcome& o) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), o,
        [](const Entry& e, const Outcome& x) { return e.first < x; });
    if (it != entries_.end() && it->first == o) return it->second;
    return 0.0;
  }

  SubDist scaled(double s) const {
    if (!(s >= 0) || !std::isfinite(s))
      fail(Err::kInvalidParam, "scale must be finite and >= 0");
    std::vector<Entry> es = entries_;
    for (auto& e : es) e.second *= s;
    return from_entries(std::move(es), dust_ * s);
  }

  friend bool operator==(const SubDist& a, const SubDist& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  double dust_ = 0;
};

using Kernel = std::function<SubDist(const Outcome&)>;

// Kleisli extension: (bind mu f)(y) = sum_x mu(x) * f(x)(y).
inline SubDist bind(const SubDist& mu, const Kernel& f) {
  std::vector<SubDist::Entry> out;
  double dust = mu.dust();
  for (const auto& [x, m] : mu.entries()) {
    SubDist d = f(x);
    dust += m * d.dust();
    for (const auto& [y, w] : d.entries()) out.emplace_back(y, m * w);
  }
  return SubDist::from_entries(std::move(out), dust, kDustTol);
}

// Deterministic pushforward mu . f^-1.
inline SubDist pushforward(const SubDist& mu,
                           const std::function<Outcome(const Outcome&)>& f) {
  std::vector<SubDist::Entry> out;
  out.reserve(mu.support_size());
  for (const auto& [x, m] : mu.entries()) out.emplace_back(f(x), m);
  return SubDist::from_entries(std::move(out), mu.dust(), kDustTol);
}

// Independent product over 2-tuples (the double strength on pairs).
inline SubDist product(const SubDist& a, const SubDist& b) {
  std::vector<SubDist::Entry> out;
  out.reserve(a.support_size() * b.support_size());
  for (const auto& [x, m] : a.entries())
    for (const auto& [y, w] : b.entries())
      out.emplace_back(Outcome::of_tuple({x, y}), m * w);
  return SubDist::from_entries(std::move(out),
                               a.dust() * b.total_mass() +
                                   b.dust() * a.total_mass() +
                                   a.dust() * b.dust(),
                               kDustTol);
}

// Component marginal of a distribution over tuples.
inline SubDist marginal(const SubDist& mu, std::size_t index) {
  std::vector<SubDist::Entry> out;
  out.reserve(mu.support_size());
  for (const auto& [x, m] : mu.entries()) {
    const auto& t = x.as_tuple();
    if (index >= t.size())
      fail(Err::kShapeError, "marginal index out of range");
    out.emplace_back(t[index], m);
  }
  return SubDist::from_entries(std::move(out), mu.dust(), kDustTol);
}

// Adaptive composition: x |-> distribution over (y, z) with y ~ f(x) and
// z ~ g(y, x). The second stage sees both the first result and the input.
inline Kernel adaptive_compose(
    Kernel f, std::function<SubDist(const Outcome&, const Outcome&)> g) {
  if (!f || !g) fail(Err::kInvalidParam, "adaptive_compose needs two stages");
  return [f = std::move(f), g = std::move(g)](const Outcome& x) {
    return bind(f(x), [&](const Outcome& y) {
      return pushforward(g(y, x), [&](const Outcome& z) {
        return Outcome::of_tuple({y, z});
      });
    });
  };
}

}  // namespace spanlift
