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
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "spanlift/dist.hpp"
#include "spanlift/error.hpp"
#include "spanlift/numerics.hpp"

namespace spanlift {

namespace detail {

// Merge-iterate the sorted union of two supports, visiting (outcome, p, q)
// where p is mu1's mass and q is mu2's. Both supports are already sorted.
template <typename Visitor>
void for_each_union(const SubDist& mu1, const SubDist& mu2, Visitor&& visit) {
  const auto& a = mu1.entries();
  const auto& b = mu2.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      visit(a[i].first, a[i].second, 0.0);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      visit(b[j].first, 0.0, b[j].second);
      ++j;
    } else {
      visit(a[i].first, a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
}

// Shared accumulator for f-divergences and their partition bounds: a plain
// left-to-right double sum of perspective terms, so a singleton partition
// reproduces the full divergence bit for bit.
class PerspectiveSum {
 public:
  explicit PerspectiveSum(const WeightFn& f) : f_(f) {}
  void add(double q, double p) {
    ExtReal t = perspective(q, p, f_);
    if (!t.is_finite()) {
      infinite_ = true;
    } else if (!infinite_) {
      acc_ += t.value();
    }
  }
  ExtReal total() const {
    return infinite_ ? ExtReal::pos_inf() : ExtReal(acc_);
  }

 private:
  const WeightFn& f_;
  double acc_ = 0;
  bool infinite_ = false;
};

}  // namespace detail

// f-divergence of mu1 from mu2 under weight f:
//   sum_x perspective(mu2(x), mu1(x), f)
// with the 0-mass conventions handled by perspective().
inline ExtReal f_divergence(const SubDist& mu1, const SubDist& mu2,
                            const WeightFn& f) {
  detail::PerspectiveSum sum(f);
  detail::for_each_union(
      mu1, mu2, [&](const Outcome&, double p, double q) { sum.add(q, p); });
  return sum.total();
}

// DP divergence at eps: sum_x max(0, mu2(x) - e^eps * mu1(x)).
inline ExtReal dp_divergence(double eps, const SubDist& mu1,
                             const SubDist& mu2) {
  return f_divergence(mu1, mu2, WeightFn::dp(eps));
}

// Hockey-stick divergence: sum_x max(0, mu1(x) - e^eps * mu2(x)). The same
// quantity as dp_divergence with the arguments swapped.
inline ExtReal hockey_stick(const SubDist& mu1, const SubDist& mu2,
                            double eps) {
  return dp_divergence(eps, mu2, mu1);
}

// Renyi divergence of order alpha > 1, computed in the log domain:
//   D^alpha = logsumexp_x(alpha ln p_x + (1 - alpha) ln q_x) / (alpha - 1)
// over outcomes with p > 0 and q > 0. Any outcome with p > 0, q = 0 makes
// the divergence +inf; a null mu1 gives -inf.
inline ExtReal renyi_divergence(double alpha, const SubDist& mu1,
                                const SubDist& mu2) {
  if (!(alpha > 1) || !std::isfinite(alpha))
    fail(Err::kInvalidParam, "renyi divergence needs finite alpha > 1");
  std::vector<double> terms;
  terms.reserve(mu1.support_size());
  bool mismatch = false;
  detail::for_each_union(mu1, mu2,
                         [&](const Outcome&, double p, double q) {
                           if (p <= 0) return;
                           if (q <= 0) {
                             mismatch = true;
                             return;
                           }
                           terms.push_back(alpha * std::log(p) +
                                           (1.0 - alpha) * std::log(q));
                         });
  if (mismatch) return ExtReal::pos_inf();
  double lse = logsumexp(terms);
  if (lse == -std::numeric_limits<double>::infinity())
    return ExtReal::neg_inf();
  return ExtReal(lse / (alpha - 1.0));
}

// KL divergence (the alpha -> 1 limit of the Renyi family when mu1 has
// total mass 1): sum_{p > 0} p ln(p / q).
inline ExtReal kl_divergence(const SubDist& mu1, const SubDist& mu2) {
  double acc = 0;
  bool mismatch = false;
  detail::for_each_union(mu1, mu2, [&](const Outcome&, double p, double q) {
    if (p <= 0) return;
    if (q <= 0) {
      mismatch = true;
      return;
    }
    acc += p * std::log(p / q);
  });
  if (mismatch) return ExtReal::pos_inf();
  return ExtReal(acc);
}

// Evidence for a supremum over Renyi orders: where the maximum was found,
// how it was found, and the final search bracket.
struct SupCertificate {
  ExtReal value = ExtReal::neg_inf();
  ExtReal argmax_alpha = ExtReal::neg_inf();
  int grid_points = 0;
  bool refined = false;
  double bracket_lo = 0;
  double bracket_hi = 0;
};

namespace detail {

// Precomputed log-masses over the shared support, for cheap D^alpha evals.
struct RenyiProfile {
  std::vector<double> lp, lq;
  bool mismatch = false;   // some p > 0 where q = 0
  bool null_left = false;  // mu1 has no mass at all
  double mass_left = 0;
  double kl = 0;  // sum p ln(p/q), valid when !mismatch

  double renyi(double alpha) const {
    std::vector<double> terms(lp.size());
    for (std::size_t i = 0; i < lp.size(); ++i)
      terms[i] = alpha * lp[i] + (1.0 - alpha) * lq[i];
    double lse = logsumexp(terms);
    return lse / (alpha - 1.0);  // -inf stays -inf
  }
};

inline RenyiProfile renyi_profile(const SubDist& mu1, const SubDist& mu2) {
  RenyiProfile r;
  detail::for_each_union(mu1, mu2, [&](const Outcome&, double p, double q) {
    r.mass_left += p;
    if (p <= 0) return;
    if (q <= 0) {
      r.mismatch = true;
      return;
    }
    r.lp.push_back(std::log(p));
    r.lq.push_back(std::log(q));
    r.kl += p * std::log(p / q);
  });
  r.null_left = mu1.support_size() == 0;
  return r;
}

// Maximizes h over a log-spaced alpha grid (alpha - 1 from lo_off to hi_off,
// `points` samples) followed by golden-section refinement around the best
// grid point down to a bracket of width 1e-6.
inline SupCertificate maximize_over_alpha(
    const std::function<double(double)>& h, double lo_off, double hi_off,
    int points) {
  SupCertificate cert;
  cert.grid_points = points;
  std::vector<double> alphas(points);
  double llo = std::log(lo_off), lhi = std::log(hi_off);
  for (int j = 0; j < points; ++j) {
    double t = points == 1 ? 0.0
                           : static_cast<double>(j) /
                                 static_cast<double>(points - 1);
    alphas[j] = 1.0 + std::exp(llo + t * (lhi - llo));
  }
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < points; ++j) {
    double v = h(alphas[j]);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  double lo = alphas[std::max(best - 1, 0)];
  double hi = alphas[std::min(best + 1, points - 1)];
  cert.bracket_lo = lo;
  cert.bracket_hi = hi;
  cert.value = ExtReal(best_val);
  cert.argmax_alpha = ExtReal(alphas[best]);
  if (hi > lo) {
    MaxResult r = golden_section_max(h, lo, hi, 1e-6);
    cert.refined = true;
    if (r.fx >= best_val) {
      cert.value = ExtReal(r.fx);
      cert.argmax_alpha = ExtReal(r.x);
    }
  }
  return cert;
}

}  // namespace detail

// zCDP divergence at xi >= 0: sup_{alpha > 1} (D^alpha - xi) / alpha.
// Search: 200-point log-spaced grid over alpha - 1 in [1e-6, 1e6 - 1],
// golden-section refinement, plus the analytic boundary candidates
// alpha -> 1+ (KL - xi, when mu1 is a full probability) and
// alpha -> inf (0, when supports are compatible).
inline SupCertificate zcdp_divergence(double xi, const SubDist& mu1,
                                      const SubDist& mu2) {
  if (!(xi >= 0) || !std::isfinite(xi))
    fail(Err::kInvalidParam, "zcdp divergence needs finite xi >= 0");
  auto prof = detail::renyi_profile(mu1, mu2);
  SupCertificate cert;
  if (prof.mismatch) {
    cert.value = ExtReal::pos_inf();
    cert.argmax_alpha = ExtReal::pos_inf();
    return cert;
  }
  if (prof.null_left) {
    cert.value = ExtReal::neg_inf();
    cert.argmax_alpha = ExtReal::neg_inf();
    return cert;
  }
  auto h = [&](double alpha) { return (prof.renyi(alpha) - xi) / alpha; };
  cert = detail::maximize_over_alpha(h, 1e-6, 1e6 - 1.0, 200);
  if (std::abs(prof.mass_left - 1.0) <= 1e-12) {
    double at_one = prof.kl - xi;
    if (!(cert.value >= ExtReal(at_one))) {
      cert.value = ExtReal(at_one);
      cert.argmax_alpha = ExtReal(1.0);
    }
  }
  // As alpha -> inf, (D^alpha - xi)/alpha -> 0 on compatible supports.
  if (!(cert.value >= ExtReal(0.0))) {
    cert.value = ExtReal(0.0);
    cert.argmax_alpha = ExtReal::pos_inf();
  }
  return cert;
}

// omega-tCDP divergence for omega > 1: sup_{1 < alpha < omega} D^alpha / alpha.
inline SupCertificate tcdp_divergence(double omega, const SubDist& mu1,
                                      const SubDist& mu2) {
  if (!(omega > 1) || !std::isfinite(omega))
    fail(Err::kInvalidParam, "tcdp divergence needs finite omega > 1");
  auto prof = detail::renyi_profile(mu1, mu2);
  SupCertificate cert;
  if (prof.mismatch) {
    cert.value = ExtReal::pos_inf();
    cert.argmax_alpha = ExtReal::pos_inf();
    return cert;
  }
  if (prof.null_left) {
    cert.value = ExtReal::neg_inf();
    cert.argmax_alpha = ExtReal::neg_inf();
    return cert;
  }
  auto h = [&](double alpha) { return prof.renyi(alpha) / alpha; };
  double hi_off = (omega - 1.0) * (1.0 - 1e-12);
  double lo_off = std::min(1e-6, hi_off * 0.5);
  cert = detail::maximize_over_alpha(h, lo_off, hi_off, 200);
  if (std::abs(prof.mass_left - 1.0) <= 1e-12) {
    if (!(cert.value >= ExtReal(prof.kl))) {
      cert.value = ExtReal(prof.kl);
      cert.argmax_alpha = ExtReal(1.0);
    }
  }
  return cert;
}

// Pointwise privacy loss L(y) = mu1(y) / mu2(y). Undefined at 0/0.
inline ExtReal privacy_loss(const SubDist& mu1, const SubDist& mu2,
                            const Outcome& y) {
  double p = mu1.mass(y), q = mu2.mass(y);
  if (p <= 0 && q <= 0)
    fail(Err::kUndefinedLoss, "privacy loss undefined where both masses are 0");
  if (q <= 0) return ExtReal::pos_inf();
  return ExtReal(p / q);
}

// One divergence family with its grade parameter.
enum class DivFamily { kDp, kRenyi, kZcdp, kTcdp };

struct DivergenceSpec {
  DivFamily family = DivFamily::kDp;
  double param = 0;  // eps / alpha / xi / omega

  static DivergenceSpec dp(double eps) { return {DivFamily::kDp, eps}; }
  static DivergenceSpec renyi(double alpha) {
    return {DivFamily::kRenyi, alpha};
  }
  static DivergenceSpec zcdp(double xi) { return {DivFamily::kZcdp, xi}; }
  static DivergenceSpec tcdp(double omega) {
    return {DivFamily::kTcdp, omega};
  }
};

inline ExtReal divergence_value(const DivergenceSpec& s, const SubDist& mu1,
                                const SubDist& mu2) {
  switch (s.family) {
    case DivFamily::kDp: return dp_divergence(s.param, mu1, mu2);
    case DivFamily::kRenyi: return renyi_divergence(s.param, mu1, mu2);
    case DivFamily::kZcdp: return zcdp_divergence(s.param, mu1, mu2).value;
    case DivFamily::kTcdp: return tcdp_divergence(s.param, mu1, mu2).value;
  }
  fail(Err::kInvalidParam, "unknown divergence family");
}

// Grade for the two-fold composition of the same family: additive grades
// double, index-style grades (Renyi alpha, tCDP omega) stay fixed.
inline DivergenceSpec doubled_grade(const DivergenceSpec& s) {
  switch (s.family) {
    case DivFamily::kDp: return DivergenceSpec::dp(2.0 * s.param);
    case DivFamily::kZcdp: return DivergenceSpec::zcdp(2.0 * s.param);
    case DivFamily::kRenyi:
    case DivFamily::kTcdp: return s;
  }
  fail(Err::kInvalidParam, "unknown divergence family");
}

// Closed-form Renyi divergences between named continuous densities.
struct ParamDensity {
  enum class Kind { kGauss, kLaplace } kind = Kind::kGauss;
  double mean = 0;
  double param = 1;  // variance for kGauss, scale for kLaplace
};

inline ExtReal renyi_closed_form(double alpha, const ParamDensity& a,
                                 const ParamDensity& b) {
  if (!(alpha > 1)) fail(Err::kInvalidParam, "closed form needs alpha > 1");
  if (a.kind != b.kind || a.param != b.param)
    fail(Err::kUnsupportedPair,
         "closed form needs two densities of the same kind and scale");
  double r = std::abs(a.mean - b.mean);
  if (a.kind == ParamDensity::Kind::kGauss) {
    if (!(a.param > 0)) fail(Err::kInvalidParam, "variance must be > 0");
    return ExtReal(alpha * r * r / (2.0 * a.param));
  }
  if (!(a.param > 0)) fail(Err::kInvalidParam, "scale must be > 0");
  double lam = a.param;
  double v = (alpha / (2.0 * alpha - 1.0)) *
                 std::exp((alpha - 1.0) * r / lam) +
             ((alpha - 1.0) / (2.0 * alpha - 1.0)) *
                 std::exp(-alpha * r / lam);
  return ExtReal(std::log(v) / (alpha - 1.0));
}

// Coarse lower bound on an f-divergence from a partition of the outcome
// space: blocks must be disjoint and jointly cover both supports. Uses the
// same accumulation as f_divergence, so the all-singletons partition gives
// exactly the full divergence.
using Partition = std::vector<std::vector<Outcome>>;

inline ExtReal partition_lower_bound(const SubDist& mu1, const SubDist& mu2,
                                     const Partition& partition,
                                     const WeightFn& f) {
  struct Block {
    Outcome key;
    double p = 0, q = 0;
  };
  std::set<Outcome> seen;
  std::vector<Block> blocks;
  blocks.reserve(partition.size());
  for (const auto& outcomes : partition) {
    if (outcomes.empty())
      fail(Err::kInvalidPartition, "empty block in partition");
    Block blk;
    blk.key = *std::min_element(outcomes.begin(), outcomes.end());
    for (const auto& o : outcomes) {
      if (!seen.insert(o).second)
        fail(Err::kInvalidPartition,
             "outcome appears in more than one block: " + o.to_string());
      blk.p += mu1.mass(o);
      blk.q += mu2.mass(o);
    }
    blocks.push_back(std::move(blk));
  }
  for (const auto& mu : {&mu1, &mu2})
    for (const auto& [o, m] : mu->entries())
      if (!seen.count(o))
        fail(Err::kInvalidPartition,
             "support outcome missing from partition: " + o.to_string());
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.key < b.key; });
  detail::PerspectiveSum sum(f);
  for (const auto& b : blocks) sum.add(b.q, b.p);
  return sum.total();
}

// ---------------------------------------------------------------------------
// Structural properties, checked numerically on concrete instances.

enum class Property {
  kReflexive,
  kDpi,
  kAdditive,
  kComposable,
  kMonotoneAlpha,
  kWeakTriangle,
};

inline const char* property_name(Property p) {
  switch (p) {
    case Property::kReflexive: return "REFLEXIVE";
    case Property::kDpi: return "DPI";
    case Property::kAdditive: return "ADDITIVE";
    case Property::kComposable: return "COMPOSABLE";
    case Property::kMonotoneAlpha: return "MONOTONE_ALPHA";
    case Property::kWeakTriangle: return "WEAK_TRIANGLE";
  }
  return "?";
}

struct PropertyOutcome {
  bool holds = false;
  ExtReal lhs;
  ExtReal rhs;
};

namespace detail {
inline PropertyOutcome le_with_slack(ExtReal lhs, ExtReal rhs, double slack) {
  ExtReal bound = rhs.is_finite() ? ExtReal(rhs.value() + slack) : rhs;
  return {lhs <= bound, lhs, rhs};
}
}  // namespace detail

// Delta(mu, mu) <= 0.
inline PropertyOutcome check_reflexive(const DivergenceSpec& s,
                                       const SubDist& mu,
                                       double slack = 1e-9) {
  return detail::le_with_slack(divergence_value(s, mu, mu), ExtReal(0.0),
                               slack);
}

// Data processing: pushing both sides through one map cannot increase the
// divergence.
inline PropertyOutcome check_dpi(
    const DivergenceSpec& s, const SubDist& mu1, const SubDist& mu2,
    const std::function<Outcome(const Outcome&)>& f, double slack = 1e-9) {
  return detail::le_with_slack(
      divergence_value(s, pushforward(mu1, f), pushforward(mu2, f)),
      divergence_value(s, mu1, mu2), slack);
}

// Additivity over independent products, with the doubled grade on the left.
inline PropertyOutcome check_additive(const DivergenceSpec& s,
                                      const SubDist& mu1, const SubDist& mu2,
                                      const SubDist& mu3, const SubDist& mu4,
                                      double slack = 1e-9) {
  ExtReal lhs = divergence_value(doubled_grade(s), product(mu1, mu3),
                                 product(mu2, mu4));
  ExtReal rhs = divergence_value(s, mu1, mu2) + divergence_value(s, mu3, mu4);
  return detail::le_with_slack(lhs, rhs, slack);
}

// Sequential composition through a pair of kernels: the doubled grade bounds
// the first-stage divergence plus the worst second-stage divergence over the
// declared input domain.
inline PropertyOutcome check_composable(const DivergenceSpec& s,
                                        const SubDist& mu1,
                                        const SubDist& mu2, const Kernel& f,
                                        const Kernel& g,
                                        const std::vector<Outcome>& domain,
                                        double slack = 1e-9) {
  ExtReal lhs =
      divergence_value(doubled_grade(s), bind(mu1, f), bind(mu2, g));
  ExtReal stage2 = ExtReal::neg_inf();
  for (const auto& x : domain) {
    ExtReal d = divergence_value(s, f(x), g(x));
    if (!(d <= stage2)) stage2 = d;
  }
  ExtReal rhs = divergence_value(s, mu1, mu2) + stage2;
  return detail::le_with_slack(lhs, rhs, slack);
}

// Renyi orders are monotone: alpha1 <= alpha2 implies D^a1 <= D^a2.
inline PropertyOutcome check_monotone_alpha(double alpha1, double alpha2,
                                            const SubDist& mu1,
                                            const SubDist& mu2,
                                            double slack = 1e-9) {
  if (!(alpha1 <= alpha2))
    fail(Err::kInvalidParam, "monotone check needs alpha1 <= alpha2");
  return detail::le_with_slack(renyi_divergence(alpha1, mu1, mu2),
                               renyi_divergence(alpha2, mu1, mu2), slack);
}

// Weak triangle inequality for Renyi orders via Holder split 1/p + 1/q = 1:
//   D^a(mu1 || mu3) <= ((pa-1)/(p(a-1))) D^{pa}(mu1 || mu2)
//                      + D^{(q/p)(pa-1)}(mu2 || mu3).
inline PropertyOutcome check_weak_triangle(double alpha, double p,
                                           const SubDist& mu1,
                                           const SubDist& mu2,
                                           const SubDist& mu3,
                                           double slack = 1e-9) {
  if (!(alpha > 1) || !(p > 1))
    fail(Err::kInvalidParam, "weak triangle needs alpha > 1 and p > 1");
  double q = p / (p - 1.0);
  double coeff = (p * alpha - 1.0) / (p * (alpha - 1.0));
  ExtReal lhs = renyi_divergence(alpha, mu1, mu3);
  ExtReal mid = renyi_divergence(p * alpha, mu1, mu2);
  ExtReal last = renyi_divergence((q / p) * (p * alpha - 1.0), mu2, mu3);
  ExtReal rhs = coeff * mid + last;
  return detail::le_with_slack(lhs, rhs, slack);
}

// ---------------------------------------------------------------------------
// Randomized instance generation for property suites.

// Random subprobability (or probability) distribution over small integers.
inline SubDist random_subdist(std::mt19937_64& rng, int max_support,
                              bool probability, int universe = 8) {
  std::uniform_int_distribution<int> ksup(1, max_support);
  std::uniform_int_distribution<int> pick(0, universe - 1);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  int k = ksup(rng);
  std::set<int> points;
  while (static_cast<int>(points.size()) < k) points.insert(pick(rng));
  double total = 0;
  std::vector<double> ws;
  for (int i = 0; i < k; ++i) {
    ws.push_back(w(rng));
    total += ws.back();
  }
  double target = probability
                      ? 1.0
                      : std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  std::vector<SubDist::Entry> es;
  int i = 0;
  for (int pt : points)
    es.emplace_back(Outcome::of_int(pt), ws[i++] / total * target);
  return SubDist::from_entries(std::move(es));
}

// A pair over the same universe; usually sharing their support so the
// finite-divergence paths get exercised, sometimes not.
inline std::pair<SubDist, SubDist> random_pair(std::mt19937_64& rng,
                                               int max_support,
                                               int universe = 8) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  bool probability = u01(rng) < 0.5;
  SubDist a = random_subdist(rng, max_support, probability, universe);
  if (u01(rng) < 0.7) {
    // Same support, fresh masses.
    std::uniform_real_distribution<double> w(0.05, 1.0);
    double total = 0;
    std::vector<double> ws;
    for (std::size_t i = 0; i < a.support_size(); ++i) {
      ws.push_back(w(rng));
      total += ws.back();
    }
    double target =
        probability ? 1.0 : std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    std::vector<SubDist::Entry> es;
    std::size_t i = 0;
    for (const auto& [o, m] : a.entries())
      es.emplace_back(o, ws[i++] / total * target);
    return {a, SubDist::from_entries(std::move(es))};
  }
  return {a, random_subdist(rng, max_support, probability, universe)};
}

struct SuiteReport {
  int instances = 0;
  int failures = 0;
  double worst_gap = 0;  // max over instances of lhs - rhs (finite cases)
};

// Runs `n` randomized instances of one property under one divergence spec.
// Throws UNSUPPORTED_PROPERTY for combinations that only make sense for the
// Renyi family.
inline SuiteReport run_property_suite(Property prop, const DivergenceSpec& s,
                                      int n, std::uint64_t seed,
                                      int max_support = 6,
                                      double slack = 1e-9) {
  if ((prop == Property::kMonotoneAlpha || prop == Property::kWeakTriangle) &&
      s.family != DivFamily::kRenyi)
    fail(Err::kUnsupportedProperty,
         std::string(property_name(prop)) + " is only defined for the Renyi family");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SuiteReport report;
  for (int it = 0; it < n; ++it) {
    PropertyOutcome out;
    switch (prop) {
      case Property::kReflexive: {
        out = check_reflexive(s, random_subdist(rng, max_support, false),
                              slack);
        break;
      }
      case Property::kDpi: {
        auto [m1, m2] = random_pair(rng, max_support);
        std::uniform_int_distribution<int> img(0, 3);
        std::vector<int> table(8);
        for (auto& v : table) v = img(rng);
        auto f = [table](const Outcome& o) {
          return Outcome::of_int(table[static_cast<std::size_t>(o.as_int())]);
        };
        out = check_dpi(s, m1, m2, f, slack);
        break;
      }
      case Property::kAdditive: {
        auto [m1, m2] = random_pair(rng, max_support);
        auto [m3, m4] = random_pair(rng, max_support);
        out = check_additive(s, m1, m2, m3, m4, slack);
        break;
      }
      case Property::kComposable: {
        auto [m1, m2] = random_pair(rng, 4, 4);
        std::vector<Outcome> domain;
        for (int x = 0; x < 4; ++x) domain.push_back(Outcome::of_int(x));
        std::vector<std::pair<SubDist, SubDist>> rows;
        for (int x = 0; x < 4; ++x) rows.push_back(random_pair(rng, 4, 4));
        Kernel f = [rows](const Outcome& o) {
          return rows[static_cast<std::size_t>(o.as_int())].first;
        };
        Kernel g = [rows](const Outcome& o) {
          return rows[static_cast<std::size_t>(o.as_int())].second;
        };
        out = check_composable(s, m1, m2, f, g, domain, slack);
        break;
      }
      case Property::kMonotoneAlpha: {
        auto [m1, m2] = random_pair(rng, max_support);
        double a1 = 1.0 + u01(rng) * 3.0;
        double a2 = a1 + u01(rng) * 4.0;
        out = check_monotone_alpha(a1, a2, m1, m2, slack);
        break;
      }
      case Property::kWeakTriangle: {
        auto [m1, m2] = random_pair(rng, max_support);
        auto [m3, m4] = random_pair(rng, max_support);
        (void)m4;
        out = check_weak_triangle(s.param, 2.0, m1, m2, m3, slack);
        break;
      }
    }
    ++report.instances;
    if (!out.holds) ++report.failures;
    if (out.lhs.is_finite() && out.rhs.is_finite())
      report.worst_gap =
          std::max(report.worst_gap, out.lhs.value() - out.rhs.value());
  }
  return report;
}

}  // namespace spanlift
