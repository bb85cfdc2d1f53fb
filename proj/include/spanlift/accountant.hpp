// Copyright 2026 The spanlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Privacy budget arithmetic detached from programs: sequential and group
// composition per flavor, conversions between flavors, the advanced
// composition baseline, and the concentrated-vs-advanced comparison for
// iterated Gaussian noise. All formulas are in nats.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spanlift/error.hpp"
#include "spanlift/logic.hpp"
#include "spanlift/numerics.hpp"

namespace spanlift {

using PrivacyBudget = Flavor;

// Sequential composition. Same arithmetic as the proof system's grade
// combination, but any disagreement (family or fixed index) is a flavor
// mismatch here: a budget ledger has no separate grade arithmetic to blame.
inline PrivacyBudget compose(const PrivacyBudget& a, const PrivacyBudget& b) {
  if (a.kind != b.kind) fail(Err::kFlavorMismatch, "budget flavors differ");
  if (a.kind == FlavorKind::kRDP && !logicdetail::close(a.alpha, b.alpha))
    fail(Err::kFlavorMismatch, "rdp budgets need one order");
  if (a.kind == FlavorKind::kTCDP && !logicdetail::close(a.omega, b.omega))
    fail(Err::kFlavorMismatch, "tcdp budgets need one width");
  return grade_combine(a, b);
}

// Target of a conversion: the flavor to land in plus the formula inputs.
struct ConvertSpec {
  FlavorKind target = FlavorKind::kDP;
  double delta = 0;  // for conversions into dp; 0 selects the pure route
  double alpha = 0;  // for zcdp into rdp

  static ConvertSpec to_dp(double delta) {
    ConvertSpec s;
    s.target = FlavorKind::kDP;
    s.delta = delta;
    return s;
  }
  static ConvertSpec to_zcdp() {
    ConvertSpec s;
    s.target = FlavorKind::kZCDP;
    return s;
  }
  static ConvertSpec to_rdp(double alpha) {
    ConvertSpec s;
    s.target = FlavorKind::kRDP;
    s.alpha = alpha;
    return s;
  }
};

inline PrivacyBudget convert_budget(const PrivacyBudget& b,
                                    const ConvertSpec& cs) {
  auto need_delta = [&] {
    if (!(cs.delta > 0 && cs.delta < 1))
      fail(Err::kInvalidParam, "conversion to dp needs delta in (0, 1)");
    return std::log(1.0 / cs.delta);
  };
  auto finite_rho = [&] {
    if (!b.rho.is_finite())
      fail(Err::kInvalidParam, "conversion needs a finite rho");
    return b.rho.value();
  };
  switch (b.kind) {
    case FlavorKind::kDP:
      if (cs.target == FlavorKind::kZCDP) {
        if (b.delta != 0)
          fail(Err::kInvalidParam,
               "only pure dp converts to zcdp losslessly");
        return Flavor::zcdp(b.eps, ExtReal(0.0));
      }
      break;
    case FlavorKind::kZCDP:
      if (cs.target == FlavorKind::kDP) {
        if (cs.delta == 0) {
          if (!(b.rho == ExtReal(0.0)))
            fail(Err::kInvalidParam, "only pure zcdp converts to pure dp");
          return Flavor::dp(b.xi, 0);
        }
        double log1d = need_delta();
        double rho = finite_rho();
        return Flavor::dp(b.xi + rho + 2 * std::sqrt(rho * log1d), cs.delta);
      }
      if (cs.target == FlavorKind::kRDP) {
        if (b.xi != 0)
          fail(Err::kInvalidParam, "zcdp converts to rdp only when xi = 0");
        if (!(cs.alpha > 1))
          fail(Err::kInvalidParam, "rdp target needs alpha > 1");
        return Flavor::rdp(cs.alpha, b.rho);
      }
      break;
    case FlavorKind::kRDP:
      if (cs.target == FlavorKind::kDP) {
        double log1d = need_delta();
        return Flavor::dp(finite_rho() + log1d / (b.alpha - 1), cs.delta);
      }
      break;
    case FlavorKind::kTCDP:
      if (cs.target == FlavorKind::kDP) {
        double log1d = need_delta();
        double rho = finite_rho();
        double beta =
            rho > 0 ? std::min(b.omega, 1 + std::sqrt(log1d / rho)) : b.omega;
        return Flavor::dp(rho * beta + log1d / (beta - 1), cs.delta);
      }
      break;
  }
  fail(Err::kUnsupportedDirection,
       std::string("no conversion from ") + flavor_name(b.kind) + " to " +
           flavor_name(cs.target));
}

// Group privacy: how a budget for neighboring inputs degrades over inputs
// that differ in k records, by iterating the flavor's transitivity law.
struct GroupParams {
  double p = 2.0;  // Hoelder exponent for the rdp path, > 1
};

inline PrivacyBudget group_privacy(const PrivacyBudget& b, std::int64_t k,
                                   const GroupParams& gp = {}) {
  if (k < 2) fail(Err::kInvalidParam, "group privacy needs k >= 2");
  switch (b.kind) {
    case FlavorKind::kDP: {
      double eps = b.eps, delta = b.delta;
      for (std::int64_t j = 1; j < k; ++j) {
        double combined_eps = eps + b.eps;
        delta = std::max(std::exp(b.eps) * delta + b.delta,
                         std::exp(eps) * b.delta + delta);
        eps = combined_eps;
      }
      return Flavor::dp(eps, delta);
    }
    case FlavorKind::kRDP: {
      // One Hoelder split per added record. The step coefficient treats the
      // budget as an order-free bound, so this is valid for mechanisms whose
      // divergence profile is bounded across orders.
      if (!(gp.p > 1))
        fail(Err::kInvalidParam, "rdp group privacy needs p > 1");
      double alpha = b.alpha;
      double coeff = (gp.p * alpha - 1) / (gp.p * (alpha - 1));
      ExtReal rho = b.rho;
      for (std::int64_t j = 1; j < k; ++j) rho = rho + coeff * b.rho;
      return Flavor::rdp(alpha, rho);
    }
    case FlavorKind::kZCDP:
      // The first-component coefficient is the proof system's reconstructed
      // default; see zcdp_group_scale for why it is not ground truth.
      return Flavor::zcdp(b.xi * zcdp_group_scale(k),
                          static_cast<double>(k * k) * b.rho);
    case FlavorKind::kTCDP:
      fail(Err::kUnsupportedFlavor,
           "no group privacy law is available for tcdp");
  }
  fail(Err::kInvalidParam, "unknown flavor");
}

// The cited advanced composition baseline for K adaptive (eps, delta1)-dp
// steps with slack delta2.
inline PrivacyBudget advanced_composition(double eps, double delta1,
                                          std::int64_t k, double delta2) {
  if (!(eps > 0)) fail(Err::kInvalidParam, "advanced composition needs eps > 0");
  if (!(delta1 > 0 && delta1 < 0.5) || !(delta2 > 0 && delta2 < 0.5))
    fail(Err::kInvalidParam,
         "advanced composition needs deltas in (0, 1/2)");
  if (k < 1) fail(Err::kInvalidParam, "advanced composition needs k >= 1");
  double kd = static_cast<double>(k);
  double eps_total =
      eps * std::sqrt(2 * kd * std::log(1.0 / delta2)) + kd * eps * eps;
  return Flavor::dp(eps_total, kd * delta1 + delta2);
}

// ---------------------------------------------------------------------------
// Composition plans: a list of per-step budgets routed through one strategy.

struct CompositionPlan {
  enum class Strategy {
    kNaiveDp,          // fold dp budgets componentwise
    kAdvancedDp,       // homogeneous dp steps through advanced composition
    kZcdpThenConvert,  // fold zcdp, then convert to dp at `delta`
    kRdpThenConvert,   // fold rdp at `alpha`, then convert to dp at `delta`
  };
  std::vector<PrivacyBudget> steps;
  Strategy strategy = Strategy::kNaiveDp;
  double delta = 0;  // advanced slack / conversion target delta
  double alpha = 0;  // expected rdp order (0 accepts the steps' own order)
};

inline const char* strategy_name(CompositionPlan::Strategy s) {
  switch (s) {
    case CompositionPlan::Strategy::kNaiveDp: return "naive-dp";
    case CompositionPlan::Strategy::kAdvancedDp: return "advanced-dp";
    case CompositionPlan::Strategy::kZcdpThenConvert: return "zcdp-convert";
    case CompositionPlan::Strategy::kRdpThenConvert: return "rdp-convert";
  }
  return "?";
}

struct AccountReport {
  PrivacyBudget budget;
  std::string route;
  std::optional<Flavor> intermediate;  // composite before any conversion
  std::vector<std::string> notes;
};

inline AccountReport evaluate_plan(const CompositionPlan& plan) {
  if (plan.steps.empty())
    fail(Err::kInvalidParam, "a composition plan needs at least one step");
  auto fold_kind = [&](FlavorKind want) {
    PrivacyBudget acc = plan.steps.front();
    if (acc.kind != want)
      fail(Err::kFlavorMismatch,
           std::string("plan strategy expects ") + flavor_name(want) +
               " steps");
    for (std::size_t i = 1; i < plan.steps.size(); ++i)
      acc = compose(acc, plan.steps[i]);
    return acc;
  };
  AccountReport rep;
  rep.route = strategy_name(plan.strategy);
  switch (plan.strategy) {
    case CompositionPlan::Strategy::kNaiveDp:
      rep.budget = fold_kind(FlavorKind::kDP);
      return rep;
    case CompositionPlan::Strategy::kAdvancedDp: {
      const PrivacyBudget& first = plan.steps.front();
      if (first.kind != FlavorKind::kDP)
        fail(Err::kFlavorMismatch, "advanced composition expects dp steps");
      for (const auto& s : plan.steps)
        if (s.kind != FlavorKind::kDP ||
            !logicdetail::close(s.eps, first.eps) ||
            !logicdetail::close(s.delta, first.delta))
          fail(Err::kFlavorMismatch,
               "advanced composition needs homogeneous dp steps");
      rep.budget = advanced_composition(
          first.eps, first.delta,
          static_cast<std::int64_t>(plan.steps.size()), plan.delta);
      return rep;
    }
    case CompositionPlan::Strategy::kZcdpThenConvert: {
      Flavor mid = fold_kind(FlavorKind::kZCDP);
      rep.intermediate = mid;
      rep.budget = convert_budget(mid, ConvertSpec::to_dp(plan.delta));
      rep.notes.push_back(
          "conversion to dp treats the mechanism as lossless");
      return rep;
    }
    case CompositionPlan::Strategy::kRdpThenConvert: {
      Flavor mid = fold_kind(FlavorKind::kRDP);
      if (plan.alpha > 0 && !logicdetail::close(mid.alpha, plan.alpha))
        fail(Err::kFlavorMismatch,
             "plan order differs from the steps' rdp order");
      rep.intermediate = mid;
      rep.budget = convert_budget(mid, ConvertSpec::to_dp(plan.delta));
      rep.notes.push_back(
          "conversion to dp treats the mechanism as lossless");
      return rep;
    }
  }
  fail(Err::kInvalidParam, "unknown strategy");
}

// ---------------------------------------------------------------------------
// Iterated Gaussian noise, two ways: the concentrated route against the
// advanced composition baseline.

struct FoldGComparison {
  std::int64_t k = 0;
  double sigma = 0;
  double delta1 = 0, delta2 = 0;
  double delta_total = 0;        // k * delta1 + delta2
  double per_step_epsilon = 0;   // per-step dp cost of one Gaussian draw
  double epsilon_zcdp = 0;       // concentrated route, converted at delta2
  double epsilon_zcdp_total = 0; // same route at the matched total delta
  double epsilon_adv = 0;        // advanced composition at slack delta2
  bool inequality_asserted = false;  // k >= 2: the comparison is claimed
  bool zcdp_wins = false;            // epsilon_zcdp < epsilon_adv
};

inline FoldGComparison compare_foldg(std::int64_t k, double sigma,
                                     double delta1, double delta2) {
  if (k < 1) fail(Err::kInvalidParam, "comparison needs k >= 1");
  if (!(sigma > 0)) fail(Err::kInvalidParam, "comparison needs sigma > 0");
  if (!(delta1 > 0 && delta1 < 0.5))
    fail(Err::kInvalidParam, "comparison needs delta1 in (0, 1/2)");
  if (!(delta2 > 0 && delta2 < 0.4))
    fail(Err::kInvalidParam, "comparison needs delta2 in (0, 0.4)");

  FoldGComparison cmp;
  cmp.k = k;
  cmp.sigma = sigma;
  cmp.delta1 = delta1;
  cmp.delta2 = delta2;
  cmp.delta_total = static_cast<double>(k) * delta1 + delta2;

  // Concentrated route: unit-sensitivity Gaussian steps compose in the
  // second component, then convert to dp.
  PrivacyBudget step = Flavor::zcdp(0, ExtReal(1.0 / (2 * sigma * sigma)));
  PrivacyBudget total = step;
  for (std::int64_t j = 1; j < k; ++j) total = compose(total, step);
  cmp.epsilon_zcdp =
      convert_budget(total, ConvertSpec::to_dp(delta2)).eps;
  cmp.epsilon_zcdp_total =
      convert_budget(total, ConvertSpec::to_dp(cmp.delta_total)).eps;

  // Baseline: the per-step dp grade of one Gaussian draw, then advanced
  // composition over k adaptive steps.
  cmp.per_step_epsilon =
      std::max((1.0 + std::sqrt(3.0)) / 2.0,
               std::sqrt(2 * std::log(0.66 / delta1))) /
      sigma;
  cmp.epsilon_adv =
      advanced_composition(cmp.per_step_epsilon, delta1, k, delta2).eps;

  cmp.inequality_asserted = k >= 2;
  cmp.zcdp_wins = cmp.epsilon_zcdp < cmp.epsilon_adv;
  return cmp;
}

}  // namespace spanlift
