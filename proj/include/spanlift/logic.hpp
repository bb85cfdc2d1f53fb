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

// Relational proof checking for pWHILE program pairs: judgments graded by a
// privacy flavor, derivations as explicit trees, and a checker that
// re-derives every node. Nothing written in a proof file is trusted: grades
// are recomputed, rule shapes matched structurally, entailments discharged
// by the built-in prover or recorded as named assumptions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spanlift/dist.hpp"
#include "spanlift/divergences.hpp"
#include "spanlift/entails.hpp"
#include "spanlift/error.hpp"
#include "spanlift/interp.hpp"
#include "spanlift/lang.hpp"
#include "spanlift/numerics.hpp"

namespace spanlift {

// ---------------------------------------------------------------------------
// Flavors and their grading monoids.

enum class FlavorKind { kDP, kRDP, kZCDP, kTCDP };

inline const char* flavor_name(FlavorKind k) {
  switch (k) {
    case FlavorKind::kDP: return "dp";
    case FlavorKind::kRDP: return "rdp";
    case FlavorKind::kZCDP: return "zcdp";
    case FlavorKind::kTCDP: return "tcdp";
  }
  return "?";
}

// A flavor bundles the divergence index with the grade. Sequencing adds the
// grade components; the index (Renyi alpha, tCDP omega) is fixed.
struct Flavor {
  FlavorKind kind = FlavorKind::kDP;
  double eps = 0;      // dp grade, multiplicative component
  double delta = 0;    // dp grade, additive component
  double alpha = 2;    // rdp index, > 1
  double xi = 0;       // zcdp grade, first component
  double omega = 2;    // tcdp index, > 1
  ExtReal rho{0.0};    // rdp / zcdp / tcdp grade

  static Flavor dp(double eps, double delta) {
    Flavor f;
    f.kind = FlavorKind::kDP;
    f.eps = eps;
    f.delta = delta;
    return f;
  }
  static Flavor rdp(double alpha, ExtReal rho) {
    Flavor f;
    f.kind = FlavorKind::kRDP;
    f.alpha = alpha;
    f.rho = rho;
    return f;
  }
  static Flavor zcdp(double xi, ExtReal rho) {
    Flavor f;
    f.kind = FlavorKind::kZCDP;
    f.xi = xi;
    f.rho = rho;
    return f;
  }
  static Flavor tcdp(double omega, ExtReal rho) {
    Flavor f;
    f.kind = FlavorKind::kTCDP;
    f.omega = omega;
    f.rho = rho;
    return f;
  }

  void validate() const {
    switch (kind) {
      case FlavorKind::kDP:
        if (!(eps >= 0) || !(delta >= 0))
          fail(Err::kInvalidParam, "dp needs eps >= 0 and delta >= 0");
        return;
      case FlavorKind::kRDP:
        if (!(alpha > 1)) fail(Err::kInvalidParam, "rdp needs alpha > 1");
        if (rho < ExtReal(0.0))
          fail(Err::kInvalidParam, "rdp grade must be nonnegative");
        return;
      case FlavorKind::kZCDP:
        if (!(xi >= 0)) fail(Err::kInvalidParam, "zcdp needs xi >= 0");
        if (rho < ExtReal(0.0))
          fail(Err::kInvalidParam, "zcdp grade must be nonnegative");
        return;
      case FlavorKind::kTCDP:
        if (!(omega > 1)) fail(Err::kInvalidParam, "tcdp needs omega > 1");
        if (rho < ExtReal(0.0))
          fail(Err::kInvalidParam, "tcdp grade must be nonnegative");
        return;
    }
  }
};

// The neutral grade of a flavor, keeping its index parameters.
inline Flavor grade_unit(const Flavor& like) {
  Flavor f = like;
  f.eps = 0;
  f.delta = 0;
  f.xi = 0;
  f.rho = ExtReal(0.0);
  return f;
}

namespace logicdetail {

inline bool close(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool ext_close(ExtReal a, ExtReal b, double rel = 1e-12) {
  if (!a.is_finite() || !b.is_finite()) return a == b;
  return close(a.value(), b.value(), rel);
}

}  // namespace logicdetail

// Sequencing composes grades: every flavor here adds componentwise, with
// the index parameters required to agree.
inline Flavor grade_combine(const Flavor& a, const Flavor& b) {
  if (a.kind != b.kind)
    fail(Err::kFlavorMismatch, "cannot combine grades of different flavors");
  Flavor f = a;
  switch (a.kind) {
    case FlavorKind::kDP:
      f.eps = a.eps + b.eps;
      f.delta = a.delta + b.delta;
      return f;
    case FlavorKind::kRDP:
      if (!logicdetail::close(a.alpha, b.alpha))
        fail(Err::kBadGradeArithmetic, "rdp grades need one alpha");
      f.rho = a.rho + b.rho;
      return f;
    case FlavorKind::kZCDP:
      f.xi = a.xi + b.xi;
      f.rho = a.rho + b.rho;
      return f;
    case FlavorKind::kTCDP:
      if (!logicdetail::close(a.omega, b.omega))
        fail(Err::kBadGradeArithmetic, "tcdp grades need one omega");
      f.rho = a.rho + b.rho;
      return f;
  }
  return f;
}

// Componentwise grade order used by weakening; index parameters must match.
inline bool grade_leq(const Flavor& a, const Flavor& b) {
  if (a.kind != b.kind) return false;
  double tol = 1e-12;
  switch (a.kind) {
    case FlavorKind::kDP:
      return a.eps <= b.eps + tol && a.delta <= b.delta + tol;
    case FlavorKind::kRDP:
      return logicdetail::close(a.alpha, b.alpha) &&
             (a.rho <= b.rho || logicdetail::ext_close(a.rho, b.rho));
    case FlavorKind::kZCDP:
      return a.xi <= b.xi + tol &&
             (a.rho <= b.rho || logicdetail::ext_close(a.rho, b.rho));
    case FlavorKind::kTCDP:
      return logicdetail::close(a.omega, b.omega) &&
             (a.rho <= b.rho || logicdetail::ext_close(a.rho, b.rho));
  }
  return false;
}

inline bool flavor_close(const Flavor& a, const Flavor& b, double rel = 1e-12) {
  using logicdetail::close;
  using logicdetail::ext_close;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FlavorKind::kDP:
      return close(a.eps, b.eps, rel) && close(a.delta, b.delta, rel);
    case FlavorKind::kRDP:
      return close(a.alpha, b.alpha, rel) && ext_close(a.rho, b.rho, rel);
    case FlavorKind::kZCDP:
      return close(a.xi, b.xi, rel) && ext_close(a.rho, b.rho, rel);
    case FlavorKind::kTCDP:
      return close(a.omega, b.omega, rel) && ext_close(a.rho, b.rho, rel);
  }
  return false;
}

inline std::string flavor_summary(const Flavor& f) {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    return s;
  };
  auto ext = [&](ExtReal r) {
    if (r.is_pos_inf()) return std::string("inf");
    if (r.is_neg_inf()) return std::string("-inf");
    return num(r.value());
  };
  switch (f.kind) {
    case FlavorKind::kDP: return "dp(" + num(f.eps) + ", " + num(f.delta) + ")";
    case FlavorKind::kRDP:
      return "rdp(alpha=" + num(f.alpha) + ", " + ext(f.rho) + ")";
    case FlavorKind::kZCDP:
      return "zcdp(" + num(f.xi) + ", " + ext(f.rho) + ")";
    case FlavorKind::kTCDP:
      return "tcdp(omega=" + num(f.omega) + ", " + ext(f.rho) + ")";
  }
  return "?";
}

// The divergence a flavor grades, and the budget component it bounds.
inline ExtReal flavor_divergence(const Flavor& f, const SubDist& a,
                                 const SubDist& b) {
  switch (f.kind) {
    case FlavorKind::kDP: return dp_divergence(f.eps, a, b);
    case FlavorKind::kRDP: return renyi_divergence(f.alpha, a, b);
    case FlavorKind::kZCDP: return zcdp_divergence(f.xi, a, b).value;
    case FlavorKind::kTCDP: return tcdp_divergence(f.omega, a, b).value;
  }
  fail(Err::kInvalidParam, "unknown flavor");
}

inline ExtReal flavor_budget(const Flavor& f) {
  return f.kind == FlavorKind::kDP ? ExtReal(f.delta) : f.rho;
}

// ---------------------------------------------------------------------------
// Judgments and derivations.

struct Judgment {
  Context ctx;
  Cmd left, right;
  Assertion pre, post;
  Flavor flavor;
};

// Rule-specific data a derivation node carries beyond its premises.
struct SideParams {
  std::map<std::string, double> nums;  // e.g. n, k, p, q
  std::optional<Expr> variant;         // loop variant expression
  std::optional<Assertion> invariant;  // loop invariant
  std::string label;                   // name of an assumption leaf
};

struct Derivation {
  std::string rule;
  Judgment conclusion;
  std::vector<Derivation> premises;
  SideParams side;
};

struct RuleInfo {
  const char* name;
  bool extension = false;     // sound convenience beyond the core rule set
  bool experimental = false;  // arithmetic reconstructed from a damaged source
};

inline const std::vector<RuleInfo>& rule_registry() {
  static const std::vector<RuleInfo> kRules = {
      {"assn"}, {"seq"}, {"skip"}, {"cond"}, {"while"}, {"case"}, {"weak"},
      {"dp-bern"}, {"dp-bern-eq"}, {"rdp-bern"}, {"rdp-bern-eq"},
      {"zcdp-bern"}, {"zcdp-bern-eq"},
      {"dp-lap"}, {"rdp-lap"}, {"zcdp-lap"},
      {"rdp-gauss"}, {"zcdp-gauss"}, {"tcdp-gauss"}, {"dp-gauss"},
      {"tcdp-sinh-gauss"},
      {"rdp-gauss-eq", true}, {"zcdp-gauss-eq", true}, {"tcdp-gauss-eq", true},
      {"dp-trans"}, {"rdp-trans"}, {"zcdp-trans", false, true},
      {"conv-dp-zcdp"}, {"conv-zcdp-rdp"}, {"conv-zcdp-dp"}, {"conv-tcdp-dp"},
      {"conv-rdp-dp"},
      {"assume", true},
  };
  return kRules;
}

inline const RuleInfo* find_rule(const std::string& name) {
  for (const auto& r : rule_registry())
    if (name == r.name) return &r;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Rule application: recomputes the conclusion a rule yields from its
// premises, side parameters, and the shape candidate (which supplies the
// pieces a rule cannot invent: programs, axiom assertions, target flavor).

namespace logicdetail {

inline void require(bool ok, Err code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

inline bool ctx_equal(const Context& a, const Context& b) {
  if (a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i)
    if (a.vars[i].first != b.vars[i].first ||
        a.vars[i].second != b.vars[i].second)
      return false;
  return true;
}

inline Assertion var_eq_post(const std::string& x1, const std::string& x2) {
  return Assertion::rel(Expr::of_var(x1), CmpOp::kEq, Expr::of_var(x2));
}

// A mechanism judgment split into its sampling statements, base assertions,
// and the optional carried frame.
struct MechParts {
  std::string x1, x2;
  const PExpr* s1 = nullptr;
  const PExpr* s2 = nullptr;
  Assertion base_pre;
  bool framed = false;
  Assertion frame;
};

inline MechParts mech_parts(const Judgment& j) {
  require(j.left.kind == Cmd::Kind::kSample &&
              j.right.kind == Cmd::Kind::kSample,
          Err::kShapeMismatch, "mechanism rule needs two sampling statements");
  MechParts m;
  m.x1 = j.left.target;
  m.x2 = j.right.target;
  m.s1 = &*j.left.dist;
  m.s2 = &*j.right.dist;
  Assertion base_post = var_eq_post(m.x1, m.x2);
  if (assn_equal(j.post, base_post)) {
    m.base_pre = j.pre;
    return m;
  }
  // Framed form: pre = base && frame, post = (x1@1 == x2@2) && frame, with
  // the sampled variables not free in the frame.
  require(j.post.kind == AssnKind::kAnd &&
              assn_equal(j.post.kids[0], base_post),
          Err::kShapeMismatch,
          "mechanism postcondition must equal the sampled outputs");
  require(j.pre.kind == AssnKind::kAnd &&
              assn_equal(j.pre.kids[1], j.post.kids[1]),
          Err::kShapeMismatch,
          "mechanism frame must appear in both precondition and "
          "postcondition");
  m.framed = true;
  m.frame = j.post.kids[1];
  m.base_pre = j.pre.kids[0];
  std::set<std::string> fv1, fv2;
  assn_fv(m.frame, 1, fv1);
  assn_fv(m.frame, 2, fv2);
  require(!fv1.count(m.x1) && !fv2.count(m.x2), Err::kSideConditionFailed,
          "sampled variable occurs free in the mechanism frame");
  return m;
}

inline Assertion with_frame(const MechParts& m, Assertion base) {
  if (!m.framed) return base;
  return Assertion::a_and(std::move(base), m.frame);
}

// |e1<1> - e2<2>| <= bound against the sampler mean arguments; returns the
// bound as a double.
inline double match_abs_pre(const MechParts& m, const char* rule) {
  const Assertion& a = m.base_pre;
  require(a.kind == AssnKind::kAbsLe, Err::kShapeMismatch,
          std::string(rule) + " needs |e1<1> - e2<2>| <= r as precondition");
  require(expr_equal(a.left, m.s1->args[0]) &&
              expr_equal(a.right, m.s2->args[0]),
          Err::kShapeMismatch,
          std::string(rule) + " precondition must bound the sampler means");
  auto r = const_eval_rat(a.bound_expr);
  require(r.has_value(), Err::kSideConditionFailed,
          std::string(rule) + " needs a constant sensitivity bound");
  require(compare(*r, Rat(0)) >= 0, Err::kSideConditionFailed,
          "sensitivity bound must be nonnegative");
  return r->to_double();
}

// e1<1> == e2<2> against the sampler mean arguments.
inline void match_eq_pre(const MechParts& m, const char* rule) {
  const Assertion& a = m.base_pre;
  require(a.kind == AssnKind::kRel && a.cmp == CmpOp::kEq &&
              expr_equal(a.left, m.s1->args[0]) &&
              expr_equal(a.right, m.s2->args[0]),
          Err::kShapeMismatch,
          std::string(rule) + " needs e1<1> == e2<2> as precondition");
}

// (e1<1> == p) && (1 - e1<1> == e2<2>): the flipped-coin coupling. Returns p.
inline double match_bern_flip_pre(const MechParts& m, const char* rule) {
  const Assertion& a = m.base_pre;
  require(a.kind == AssnKind::kAnd && a.kids[0].kind == AssnKind::kRel &&
              a.kids[1].kind == AssnKind::kRel,
          Err::kShapeMismatch,
          std::string(rule) +
              " needs (e1<1> == p) && (1 - e1<1> == e2<2>) as precondition");
  const Assertion& first = a.kids[0];
  const Assertion& second = a.kids[1];
  require(first.cmp == CmpOp::kEq && expr_equal(first.left, m.s1->args[0]),
          Err::kShapeMismatch, std::string(rule) + " first conjunct must pin "
          "the left parameter to a constant");
  auto p = const_eval_rat(first.right);
  require(p.has_value(), Err::kSideConditionFailed,
          std::string(rule) + " needs a constant bernoulli parameter");
  require(second.cmp == CmpOp::kEq &&
              second.left.kind == ExprKind::kBinary &&
              second.left.bop == BinOp::kSub &&
              expr_equal(second.left.kids[1], m.s1->args[0]) &&
              expr_equal(second.right, m.s2->args[0]),
          Err::kShapeMismatch,
          std::string(rule) + " second conjunct must relate 1 - e1 to e2");
  auto one = const_eval_rat(second.left.kids[0]);
  require(one.has_value() && compare(*one, Rat(1)) == 0, Err::kShapeMismatch,
          std::string(rule) + " second conjunct must subtract from one");
  double pd = p->to_double();
  require(pd > 0.0 && pd < 1.0, Err::kSideConditionFailed,
          "bernoulli parameter must lie strictly inside (0, 1)");
  return pd;
}

// Shared sampler parameter (scale, variance): syntactically equal on both
// sides and constant, so the rule's arithmetic is well defined.
inline double shared_param(const MechParts& m, std::size_t idx,
                           const char* what) {
  require(expr_equal(m.s1->args[idx], m.s2->args[idx]), Err::kShapeMismatch,
          std::string("both programs must use the same ") + what);
  auto v = const_eval_rat(m.s1->args[idx]);
  require(v.has_value(), Err::kSideConditionFailed,
          std::string(what) + " must be a constant");
  double d = v->to_double();
  require(d > 0.0, Err::kSideConditionFailed,
          std::string(what) + " must be positive");
  return d;
}

inline void require_sampler(const MechParts& m, PExpr::Kind k,
                            const char* rule) {
  require(m.s1->kind == k && m.s2->kind == k, Err::kShapeMismatch,
          std::string(rule) + " applied to the wrong sampler");
}

// Extracts (x1 == x2)-shaped transitivity posts: returns {x_left, x_right}.
inline std::pair<std::string, std::string> eq_post_vars(const Assertion& a,
                                                        const char* rule) {
  require(a.kind == AssnKind::kRel && a.cmp == CmpOp::kEq &&
              a.left.kind == ExprKind::kVar && a.right.kind == ExprKind::kVar,
          Err::kShapeMismatch,
          std::string(rule) + " premises need x<1> == y<2> postconditions");
  return {a.left.var, a.right.var};
}

inline double side_num(const SideParams& side, const std::string& key,
                       const char* rule) {
  auto it = side.nums.find(key);
  if (it == side.nums.end())
    fail(Err::kBadProof,
         std::string(rule) + " needs side parameter '" + key + "'");
  return it->second;
}

}  // namespace logicdetail

// First-component scaling for zcdp group composition. The source table for
// the rule is damaged where this coefficient appears, so the triangular
// default below is a documented reconstruction, not ground truth; proofs may
// pin a different scheme through side parameters "xi_scale" (group size k)
// and "xi_scale_prev" (group size k-1), and certificates flag every use of
// the rule as experimental.
inline double zcdp_group_scale(std::int64_t j) {
  return static_cast<double>(j) * static_cast<double>(j + 1) / 2.0;
}

// Recomputes the unique conclusion of `rule` from premise judgments, side
// parameters, and the shape candidate. Pure; throws on shape or side
// condition violations. Entailment obligations are not discharged here.
inline Judgment apply_rule(const std::string& rule,
                           const std::vector<Judgment>& premises,
                           const SideParams& side, const Judgment& shape) {
  using namespace logicdetail;
  const RuleInfo* info = find_rule(rule);
  if (!info) fail(Err::kUnsupportedRule, "unknown rule: " + rule);
  for (const auto& p : premises)
    require(ctx_equal(p.ctx, shape.ctx), Err::kShapeMismatch,
            "premise context differs from the conclusion context");
  auto arity = [&](std::size_t n) {
    require(premises.size() == n, Err::kShapeMismatch,
            rule + " expects " + std::to_string(n) + " premise(s)");
  };
  Judgment out = shape;

  // --- structural rules ---
  if (rule == "skip") {
    arity(0);
    require(shape.left.kind == Cmd::Kind::kSkip &&
                shape.right.kind == Cmd::Kind::kSkip,
            Err::kShapeMismatch, "skip rule needs skip statements");
    out.post = shape.pre;
    out.flavor = grade_unit(shape.flavor);
    return out;
  }
  if (rule == "assn") {
    arity(0);
    require(shape.left.kind == Cmd::Kind::kAssign &&
                shape.right.kind == Cmd::Kind::kAssign,
            Err::kShapeMismatch, "assignment rule needs assignments");
    Assertion pre = subst_assertion(shape.post, 1, shape.left.target,
                                    *shape.left.rhs);
    pre = subst_assertion(pre, 2, shape.right.target, *shape.right.rhs);
    out.pre = std::move(pre);
    out.flavor = grade_unit(shape.flavor);
    return out;
  }
  if (rule == "seq") {
    arity(2);
    const Judgment& a = premises[0];
    const Judgment& b = premises[1];
    require(assn_equal(a.post, b.pre), Err::kShapeMismatch,
            "sequencing premises must meet in one midpoint assertion");
    out.left = Cmd::seq(a.left, b.left);
    out.right = Cmd::seq(a.right, b.right);
    out.pre = a.pre;
    out.post = b.post;
    out.flavor = grade_combine(a.flavor, b.flavor);
    return out;
  }
  if (rule == "cond") {
    arity(2);
    require(shape.left.kind == Cmd::Kind::kIte &&
                shape.right.kind == Cmd::Kind::kIte,
            Err::kShapeMismatch, "conditional rule needs conditionals");
    const Judgment& t = premises[0];
    const Judgment& e = premises[1];
    require(cmd_equal(t.left, shape.left.kids[0]) &&
                cmd_equal(t.right, shape.right.kids[0]) &&
                cmd_equal(e.left, shape.left.kids[1]) &&
                cmd_equal(e.right, shape.right.kids[1]),
            Err::kShapeMismatch,
            "conditional premises must relate the matching branches");
    Assertion guard1 = Assertion::guard(*shape.left.guard, 1);
    require(t.pre.kind == AssnKind::kAnd &&
                assn_equal(t.pre.kids[1], guard1),
            Err::kShapeMismatch,
            "then-premise must assume the run-1 guard");
    const Assertion& phi = t.pre.kids[0];
    Assertion neg = Assertion::a_not(guard1);
    require(e.pre.kind == AssnKind::kAnd &&
                assn_equal(e.pre.kids[0], phi) &&
                assn_equal(e.pre.kids[1], neg),
            Err::kShapeMismatch,
            "else-premise must assume the negated run-1 guard");
    require(assn_equal(t.post, e.post), Err::kShapeMismatch,
            "conditional branches must share one postcondition");
    require(flavor_close(t.flavor, e.flavor), Err::kBadGradeArithmetic,
            "conditional branches must share one grade");
    out.pre = phi;
    out.post = t.post;
    out.flavor = t.flavor;
    return out;
  }
  if (rule == "while") {
    require(side.variant.has_value() && side.invariant.has_value(),
            Err::kBadProof, "while rule needs a variant and an invariant");
    double nd = side_num(side, "n", "while");
    require(nd >= 0 && nd == std::floor(nd) && nd <= 1e6,
            Err::kSideConditionFailed,
            "while rule needs a nonnegative integer iteration count");
    auto n = static_cast<std::int64_t>(nd);
    arity(static_cast<std::size_t>(n));
    require(shape.left.kind == Cmd::Kind::kWhile &&
                shape.right.kind == Cmd::Kind::kWhile,
            Err::kShapeMismatch, "while rule needs loops");
    require(shape.left.bound.has_value() && *shape.left.bound == n &&
                shape.right.bound.has_value() && *shape.right.bound == n,
            Err::kSideConditionFailed,
            "loop bound annotations must equal the iteration count");
    const Expr& e = *side.variant;
    Ty et = typecheck_expr(shape.ctx, e);
    require(et.base == Base::kInt && !et.is_vector(), Err::kTypeMismatch,
            "loop variant must be an integer expression");
    const Assertion& theta = *side.invariant;
    typecheck_assertion(shape.ctx, theta);
    Flavor total = grade_unit(shape.flavor);
    for (std::int64_t k = 0; k < n; ++k) {
      const Judgment& p = premises[static_cast<std::size_t>(k)];
      require(cmd_equal(p.left, shape.left.kids[0]) &&
                  cmd_equal(p.right, shape.right.kids[0]),
              Err::kShapeMismatch,
              "loop premises must relate the loop bodies");
      Assertion want_pre = Assertion::a_and(
          Assertion::a_and(theta,
                           Assertion::rel(e, CmpOp::kEq, Expr::of_int(k))),
          Assertion::rel(e, CmpOp::kLe, Expr::of_int(n)));
      Assertion want_post = Assertion::a_and(
          theta, Assertion::rel(e, CmpOp::kGt, Expr::of_int(k)));
      require(assn_equal(p.pre, want_pre) && assn_equal(p.post, want_post),
              Err::kShapeMismatch,
              "loop premise " + std::to_string(k) +
                  " must step the variant from " + std::to_string(k));
      total = grade_combine(total, p.flavor);
    }
    out.pre = Assertion::a_and(
        Assertion::a_and(theta, Assertion::guard(*shape.left.guard, 1)),
        Assertion::rel(e, CmpOp::kGe, Expr::of_int(0)));
    out.post =
        Assertion::a_and(theta,
                         Assertion::a_not(Assertion::guard(*shape.left.guard,
                                                           1)));
    out.flavor = total;
    return out;
  }
  if (rule == "case") {
    arity(2);
    const Judgment& a = premises[0];
    const Judgment& b = premises[1];
    require(cmd_equal(a.left, b.left) && cmd_equal(a.right, b.right),
            Err::kShapeMismatch, "case premises must share their programs");
    require(assn_equal(a.post, b.post), Err::kShapeMismatch,
            "case premises must share one postcondition");
    require(flavor_close(a.flavor, b.flavor), Err::kBadGradeArithmetic,
            "case premises must share one grade");
    out.left = a.left;
    out.right = a.right;
    out.pre = Assertion::a_or(a.pre, b.pre);
    out.post = a.post;
    out.flavor = a.flavor;
    return out;
  }
  if (rule == "weak") {
    arity(1);
    const Judgment& p = premises[0];
    require(grade_leq(p.flavor, shape.flavor), Err::kSideConditionFailed,
            "weakening may only increase the grade");
    out.left = p.left;
    out.right = p.right;
    return out;
  }

  // --- mechanism axioms ---
  if (rule == "dp-bern" || rule == "zcdp-bern") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kBern, rule.c_str());
    double p = match_bern_flip_pre(m, rule.c_str());
    double lead = std::log(std::max(p, 1 - p)) - std::log(std::min(p, 1 - p));
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = rule == "dp-bern" ? Flavor::dp(lead, 0)
                                   : Flavor::zcdp(lead, ExtReal(0.0));
    return out;
  }
  if (rule == "rdp-bern") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kBern, "rdp-bern");
    double p = match_bern_flip_pre(m, "rdp-bern");
    double alpha = shape.flavor.alpha;
    require(alpha > 1, Err::kSideConditionFailed, "rdp needs alpha > 1");
    double sum = std::pow(1 - p, 1 - alpha) * std::pow(p, alpha) +
                 std::pow(p, 1 - alpha) * std::pow(1 - p, alpha);
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = Flavor::rdp(alpha, ExtReal(std::log(sum) / (alpha - 1)));
    return out;
  }
  if (rule == "dp-bern-eq" || rule == "rdp-bern-eq" ||
      rule == "zcdp-bern-eq") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kBern, rule.c_str());
    match_eq_pre(m, rule.c_str());
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = grade_unit(shape.flavor);
    FlavorKind want = rule == "dp-bern-eq"    ? FlavorKind::kDP
                      : rule == "rdp-bern-eq" ? FlavorKind::kRDP
                                              : FlavorKind::kZCDP;
    require(shape.flavor.kind == want, Err::kFlavorMismatch,
            rule + " concludes in the wrong flavor");
    return out;
  }
  if (rule == "dp-lap" || rule == "zcdp-lap") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kLap, rule.c_str());
    double lambda = shared_param(m, 1, "laplace scale");
    double r = match_abs_pre(m, rule.c_str());
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = rule == "dp-lap" ? Flavor::dp(r / lambda, 0)
                                  : Flavor::zcdp(r / lambda, ExtReal(0.0));
    return out;
  }
  if (rule == "rdp-lap") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kLap, "rdp-lap");
    double lambda = shared_param(m, 1, "laplace scale");
    double r = match_abs_pre(m, "rdp-lap");
    require(logicdetail::close(r, 1.0), Err::kSideConditionFailed,
            "rdp-lap is stated for sensitivity bound 1");
    double alpha = shape.flavor.alpha;
    require(alpha > 1, Err::kSideConditionFailed, "rdp needs alpha > 1");
    double inner = alpha / (2 * alpha - 1) * std::exp((alpha - 1) / lambda) +
                   (alpha - 1) / (2 * alpha - 1) * std::exp(-alpha / lambda);
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = Flavor::rdp(alpha, ExtReal(std::log(inner) / (alpha - 1)));
    return out;
  }
  if (rule == "rdp-gauss" || rule == "zcdp-gauss" || rule == "tcdp-gauss") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kGauss, rule.c_str());
    double sigma2 = shared_param(m, 1, "gaussian variance");
    double r = match_abs_pre(m, rule.c_str());
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    double rr = r * r / (2 * sigma2);
    if (rule == "rdp-gauss") {
      double alpha = shape.flavor.alpha;
      require(alpha > 1, Err::kSideConditionFailed, "rdp needs alpha > 1");
      out.flavor = Flavor::rdp(alpha, ExtReal(alpha * rr));
    } else if (rule == "zcdp-gauss") {
      out.flavor = Flavor::zcdp(0, ExtReal(rr));
    } else {
      require(shape.flavor.omega > 1, Err::kSideConditionFailed,
              "tcdp needs omega > 1");
      out.flavor = Flavor::tcdp(shape.flavor.omega, ExtReal(rr));
    }
    return out;
  }
  if (rule == "rdp-gauss-eq" || rule == "zcdp-gauss-eq" ||
      rule == "tcdp-gauss-eq") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kGauss, rule.c_str());
    shared_param(m, 1, "gaussian variance");
    match_eq_pre(m, rule.c_str());
    FlavorKind want = rule == "rdp-gauss-eq"    ? FlavorKind::kRDP
                      : rule == "zcdp-gauss-eq" ? FlavorKind::kZCDP
                                                : FlavorKind::kTCDP;
    require(shape.flavor.kind == want, Err::kFlavorMismatch,
            rule + " concludes in the wrong flavor");
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = grade_unit(shape.flavor);
    return out;
  }
  if (rule == "dp-gauss") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kGauss, "dp-gauss");
    double sigma2 = shared_param(m, 1, "gaussian variance");
    double r = match_abs_pre(m, "dp-gauss");
    double eps = shape.flavor.eps, delta = shape.flavor.delta;
    require(shape.flavor.kind == FlavorKind::kDP, Err::kFlavorMismatch,
            "dp-gauss concludes in dp");
    require(eps > 0 && delta > 0 && delta < 1, Err::kSideConditionFailed,
            "dp-gauss needs eps > 0 and delta in (0, 1)");
    // Minimal feasible witness for "exists c > (1+sqrt(3))/2 with
    // 2 log(0.66/delta) <= c^2 and c r / eps <= sigma".
    double c_min = (1.0 + std::sqrt(3.0)) / 2.0 + 1e-12;
    double c = std::max(c_min,
                        std::sqrt(std::max(0.0, 2 * std::log(0.66 / delta))));
    require(c * r <= eps * std::sqrt(sigma2) * (1 + 1e-12),
            Err::kSideConditionFailed,
            "dp-gauss noise is too small for the claimed (eps, delta)");
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = Flavor::dp(eps, delta);
    return out;
  }
  if (rule == "tcdp-sinh-gauss") {
    arity(0);
    MechParts m = mech_parts(shape);
    require_sampler(m, PExpr::Kind::kSinhGauss, "tcdp-sinh-gauss");
    double a = shared_param(m, 1, "sinh scale");
    double v = shared_param(m, 2, "gaussian variance");
    double d = match_abs_pre(m, "tcdp-sinh-gauss");
    require(d > 0, Err::kSideConditionFailed,
            "tcdp-sinh-gauss needs a positive sensitivity bound");
    double rho = d * d / (2 * v);  // the variance is delta^2 / (2 rho)
    require(rho < 1 && 1.0 / std::sqrt(rho) <= a / d * (1 + 1e-12),
            Err::kSideConditionFailed,
            "tcdp-sinh-gauss needs 1 < 1/sqrt(rho) <= A/delta");
    out.pre = with_frame(m, m.base_pre);
    out.post = with_frame(m, var_eq_post(m.x1, m.x2));
    out.flavor = Flavor::tcdp(a / (8 * d), ExtReal(16 * rho));
    return out;
  }

  // --- transitivity ---
  if (rule == "dp-trans" || rule == "rdp-trans" || rule == "zcdp-trans") {
    arity(2);
    const Judgment& a = premises[0];
    const Judgment& b = premises[1];
    require(cmd_equal(a.right, b.left), Err::kShapeMismatch,
            "transitivity premises must share the middle program");
    auto [xa, ya] = eq_post_vars(a.post, rule.c_str());
    auto [xb, yb] = eq_post_vars(b.post, rule.c_str());
    require(ya == xb, Err::kShapeMismatch,
            "transitivity premises must chain through one variable");
    out.left = a.left;
    out.right = b.right;
    out.pre = Assertion::compose(a.pre, b.pre);
    out.post = var_eq_post(xa, yb);
    if (rule == "dp-trans") {
      require(a.flavor.kind == FlavorKind::kDP &&
                  b.flavor.kind == FlavorKind::kDP,
              Err::kFlavorMismatch, "dp-trans needs dp premises");
      double e1 = a.flavor.eps, d1 = a.flavor.delta;
      double e2 = b.flavor.eps, d2 = b.flavor.delta;
      out.flavor = Flavor::dp(e1 + e2,
                              std::max(std::exp(e2) * d1 + d2,
                                       std::exp(e1) * d2 + d1));
      return out;
    }
    if (rule == "rdp-trans") {
      require(a.flavor.kind == FlavorKind::kRDP &&
                  b.flavor.kind == FlavorKind::kRDP,
              Err::kFlavorMismatch, "rdp-trans needs rdp premises");
      double p = side_num(side, "p", "rdp-trans");
      double q = side_num(side, "q", "rdp-trans");
      require(p > 1 && q > 1 && logicdetail::close(1 / p + 1 / q, 1.0),
              Err::kSideConditionFailed,
              "rdp-trans needs Hoelder conjugates p, q > 1");
      double alpha = shape.flavor.alpha;
      require(alpha > 1, Err::kSideConditionFailed, "rdp needs alpha > 1");
      require(logicdetail::close(a.flavor.alpha, p * alpha) &&
                  logicdetail::close(b.flavor.alpha,
                                     q * (p * alpha - 1) / p),
              Err::kSideConditionFailed,
              "rdp-trans premise orders do not match the conjugates");
      ExtReal rho = ((p * alpha - 1) / (p * (alpha - 1))) * a.flavor.rho +
                    b.flavor.rho;
      out.flavor = Flavor::rdp(alpha, rho);
      return out;
    }
    // Group-privacy composition with the reconstructed xi coefficient; see
    // zcdp_group_scale. Marked experimental in certificates.
    require(a.flavor.kind == FlavorKind::kZCDP &&
                b.flavor.kind == FlavorKind::kZCDP,
            Err::kFlavorMismatch, "zcdp-trans needs zcdp premises");
    double kd = side_num(side, "k", "zcdp-trans");
    require(kd >= 2 && kd == std::floor(kd) && kd <= 1e6,
            Err::kSideConditionFailed,
            "zcdp-trans needs an integer group size k > 1");
    auto k = static_cast<std::int64_t>(kd);
    auto scale = [&](const char* key, std::int64_t j) {
      auto it = side.nums.find(key);
      return it != side.nums.end() ? it->second : zcdp_group_scale(j);
    };
    double xi = b.flavor.xi;
    ExtReal rho = b.flavor.rho;
    Flavor want_a = Flavor::zcdp(xi * scale("xi_scale_prev", k - 1),
                                 static_cast<double>(k * k - 1) * rho);
    require(flavor_close(a.flavor, want_a), Err::kBadGradeArithmetic,
            "zcdp-trans first premise grade does not match the group step");
    out.flavor = Flavor::zcdp(xi * scale("xi_scale", k),
                              static_cast<double>(k * k) * rho);
    return out;
  }

  // --- conversions ---
  if (rule == "conv-dp-zcdp" || rule == "conv-zcdp-rdp" ||
      rule == "conv-zcdp-dp" || rule == "conv-tcdp-dp" ||
      rule == "conv-rdp-dp") {
    arity(1);
    const Judgment& p = premises[0];
    out.left = p.left;
    out.right = p.right;
    out.pre = p.pre;
    out.post = p.post;
    if (rule == "conv-dp-zcdp") {
      // Pure dp and pure zcdp coincide, in both directions.
      if (p.flavor.kind == FlavorKind::kDP &&
          shape.flavor.kind == FlavorKind::kZCDP) {
        require(p.flavor.delta == 0, Err::kSideConditionFailed,
                "conv-dp-zcdp needs a pure dp premise (delta = 0)");
        out.flavor = Flavor::zcdp(p.flavor.eps, ExtReal(0.0));
      } else if (p.flavor.kind == FlavorKind::kZCDP &&
                 shape.flavor.kind == FlavorKind::kDP) {
        require(p.flavor.rho == ExtReal(0.0), Err::kSideConditionFailed,
                "conv-dp-zcdp needs a pure zcdp premise (rho = 0)");
        out.flavor = Flavor::dp(p.flavor.xi, 0);
      } else {
        fail(Err::kUnsupportedDirection,
             "conv-dp-zcdp converts between dp and zcdp only");
      }
      return out;
    }
    if (rule == "conv-zcdp-rdp") {
      require(p.flavor.kind == FlavorKind::kZCDP, Err::kFlavorMismatch,
              "conv-zcdp-rdp needs a zcdp premise");
      require(p.flavor.xi == 0, Err::kSideConditionFailed,
              "conv-zcdp-rdp is stated for xi = 0");
      double alpha = shape.flavor.alpha;
      require(alpha > 1, Err::kSideConditionFailed, "rdp needs alpha > 1");
      out.flavor = Flavor::rdp(alpha, p.flavor.rho);
      return out;
    }
    double delta = shape.flavor.delta;
    require(shape.flavor.kind == FlavorKind::kDP && delta > 0 && delta < 1,
            Err::kSideConditionFailed,
            rule + " concludes in dp with delta in (0, 1)");
    double log1d = std::log(1.0 / delta);
    if (rule == "conv-zcdp-dp") {
      require(p.flavor.kind == FlavorKind::kZCDP, Err::kFlavorMismatch,
              "conv-zcdp-dp needs a zcdp premise");
      require(p.flavor.rho.is_finite(), Err::kSideConditionFailed,
              "conv-zcdp-dp needs a finite rho");
      double rho = p.flavor.rho.value();
      out.flavor =
          Flavor::dp(p.flavor.xi + rho + 2 * std::sqrt(rho * log1d), delta);
      return out;
    }
    if (rule == "conv-tcdp-dp") {
      require(p.flavor.kind == FlavorKind::kTCDP, Err::kFlavorMismatch,
              "conv-tcdp-dp needs a tcdp premise");
      require(p.flavor.rho.is_finite(), Err::kSideConditionFailed,
              "conv-tcdp-dp needs a finite rho");
      double rho = p.flavor.rho.value();
      double beta = rho > 0
                        ? std::min(p.flavor.omega,
                                   1 + std::sqrt(log1d / rho))
                        : p.flavor.omega;
      out.flavor = Flavor::dp(rho * beta + log1d / (beta - 1), delta);
      return out;
    }
    require(p.flavor.kind == FlavorKind::kRDP, Err::kFlavorMismatch,
            "conv-rdp-dp needs an rdp premise");
    require(p.flavor.rho.is_finite(), Err::kSideConditionFailed,
            "conv-rdp-dp needs a finite rho");
    out.flavor = Flavor::dp(p.flavor.rho.value() +
                                log1d / (p.flavor.alpha - 1),
                            delta);
    return out;
  }

  if (rule == "assume") {
    arity(0);
    require(!side.label.empty(), Err::kBadProof,
            "assumption leaves need a label");
    return out;
  }

  fail(Err::kUnsupportedRule, "unknown rule: " + rule);
}

// ---------------------------------------------------------------------------
// Derivation checking.

struct Certificate {
  bool accepted = false;
  std::string reject_path;
  Err reject_code = Err::kBadProof;
  std::string reject_detail;
  std::vector<std::string> assumptions;
  std::vector<std::string> extensions;
  Flavor final_budget;
};

struct CheckOptions {
  bool strict = false;  // reject rather than record assumptions
};

namespace logicdetail {

struct CheckFail {
  std::string path;
  Err code;
  std::string detail;
};

inline void discharge(const Context& ctx, const Assertion& premise,
                      const Assertion& goal, const std::string& what,
                      const std::string& path, Certificate& cert,
                      const CheckOptions& opts) {
  if (entails(ctx, premise, goal) == Entail::kProved) return;
  if (opts.strict)
    throw CheckFail{path, Err::kEntailmentUnknownStrict,
                    "unproved entailment (" + what + "): " +
                        print_assertion(premise) + "  ==>  " +
                        print_assertion(goal)};
  cert.assumptions.push_back("entailment at " + path + " (" + what + "): " +
                             print_assertion(premise) + "  ==>  " +
                             print_assertion(goal));
}

inline void check_node(const Derivation& d, const std::string& path,
                       Certificate& cert, const CheckOptions& opts) {
  const RuleInfo* info = find_rule(d.rule);
  if (!info)
    throw CheckFail{path, Err::kUnsupportedRule, "unknown rule: " + d.rule};

  const Judgment& j = d.conclusion;
  try {
    j.flavor.validate();
    typecheck_cmd(j.ctx, j.left);
    typecheck_cmd(j.ctx, j.right);
    typecheck_assertion(j.ctx, j.pre);
    typecheck_assertion(j.ctx, j.post);
  } catch (const Error& e) {
    throw CheckFail{path, e.code(), e.what()};
  }

  for (std::size_t i = 0; i < d.premises.size(); ++i)
    check_node(d.premises[i], path + ".premises[" + std::to_string(i) + "]",
               cert, opts);

  std::vector<Judgment> ps;
  ps.reserve(d.premises.size());
  for (const auto& p : d.premises) ps.push_back(p.conclusion);

  Judgment expect;
  try {
    expect = apply_rule(d.rule, ps, d.side, j);
  } catch (const Error& e) {
    throw CheckFail{path, e.code(), e.what()};
  }

  if (!cmd_equal(expect.left, j.left) || !cmd_equal(expect.right, j.right))
    throw CheckFail{path, Err::kShapeMismatch,
                    "programs do not match the rule's conclusion"};
  if (!assn_equal(expect.pre, j.pre))
    throw CheckFail{path, Err::kShapeMismatch,
                    "precondition does not match the rule's conclusion; "
                    "expected " + print_assertion(expect.pre)};
  if (!assn_equal(expect.post, j.post))
    throw CheckFail{path, Err::kShapeMismatch,
                    "postcondition does not match the rule's conclusion; "
                    "expected " + print_assertion(expect.post)};
  if (!flavor_close(expect.flavor, j.flavor))
    throw CheckFail{path, Err::kBadGradeArithmetic,
                    "grade does not match the rule's arithmetic; expected " +
                        flavor_summary(expect.flavor) + ", found " +
                        flavor_summary(j.flavor)};

  // Entailment obligations and recorded assumptions, by rule.
  if (d.rule == "cond") {
    discharge(j.ctx, j.pre,
              Assertion::rel(*j.left.guard, CmpOp::kEq, *j.right.guard),
              "guard agreement", path, cert, opts);
  } else if (d.rule == "while") {
    const Assertion& theta = *d.side.invariant;
    const Expr& e = *d.side.variant;
    auto n = static_cast<std::int64_t>(d.side.nums.at("n"));
    discharge(j.ctx, theta,
              Assertion::a_and(theta,
                               Assertion::rel(*j.left.guard, CmpOp::kEq,
                                              *j.right.guard)),
              "guard synchronization", path, cert, opts);
    discharge(j.ctx,
              Assertion::a_and(theta,
                               Assertion::rel(e, CmpOp::kGe,
                                              Expr::of_int(n))),
              Assertion::a_and(theta,
                               Assertion::a_not(
                                   Assertion::guard(*j.left.guard, 1))),
              "loop exit", path, cert, opts);
  } else if (d.rule == "weak") {
    discharge(j.ctx, j.pre, ps[0].pre, "precondition strengthening", path,
              cert, opts);
    discharge(j.ctx, ps[0].post, j.post, "postcondition weakening", path,
              cert, opts);
  } else if (d.rule == "assume") {
    if (opts.strict)
      throw CheckFail{path, Err::kEntailmentUnknownStrict,
                      "assumption leaf '" + d.side.label +
                          "' is not allowed in strict mode"};
    cert.assumptions.push_back("assume '" + d.side.label + "' at " + path);
  } else if (d.rule == "conv-dp-zcdp" || d.rule == "conv-zcdp-dp" ||
             d.rule == "conv-tcdp-dp" || d.rule == "conv-rdp-dp") {
    cert.assumptions.push_back("lossless programs assumed at " + path +
                               " (" + d.rule + ")");
  }

  // Frame-carrying mechanism conclusions are an extension of the axioms.
  if (d.premises.empty() && d.rule != "assume" && d.rule != "skip" &&
      d.rule != "assn" && j.post.kind == AssnKind::kAnd)
    cert.extensions.push_back("mechanism frame at " + path);
  if (info->extension)
    cert.extensions.push_back("extension rule '" + d.rule + "' at " + path);
  if (info->experimental)
    cert.extensions.push_back("experimental rule '" + d.rule + "' at " +
                              path);
}

}  // namespace logicdetail

// Bottom-up re-derivation of a proof tree. ACCEPTED means every node was
// recomputed successfully; every undischarged entailment and every leaf
// assumption is listed in the certificate.
inline Certificate check_derivation(const Derivation& d,
                                    const CheckOptions& opts = {}) {
  Certificate cert;
  try {
    logicdetail::check_node(d, "root", cert, opts);
    cert.accepted = true;
    cert.final_budget = d.conclusion.flavor;
  } catch (const logicdetail::CheckFail& f) {
    cert.accepted = false;
    cert.reject_path = f.path;
    cert.reject_code = f.code;
    cert.reject_detail = f.detail;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Witness pairs: the finite stand-in for exhibiting a span lifting.

struct WitnessReport {
  bool ok = false;
  Err reason = Err::kInvalidParam;
  std::string detail;
  ExtReal observed{0.0};
};

// Verifies that (nu1, nu2) witness mu1, mu2 within the flavor's budget:
// both witnesses live on the relation, their outer marginals match the
// endpoints, and their divergence stays within the grade.
inline WitnessReport check_witness_pair(
    const std::vector<std::pair<Outcome, Outcome>>& relation,
    const SubDist& nu1, const SubDist& nu2, const Flavor& flavor,
    const SubDist& mu1, const SubDist& mu2) {
  WitnessReport r;
  std::set<Outcome> allowed;
  for (const auto& [a, b] : relation)
    allowed.insert(Outcome::of_tuple({a, b}));
  for (const SubDist* nu : {&nu1, &nu2}) {
    for (const auto& [x, w] : nu->entries()) {
      (void)w;
      if (!x.is_tuple() || x.as_tuple().size() != 2 || !allowed.count(x)) {
        r.reason = Err::kSupportViolation;
        r.detail = "witness mass outside the relation";
        return r;
      }
    }
  }
  auto marginal_close = [](const SubDist& got, const SubDist& want) {
    std::map<Outcome, double> diff;
    for (const auto& [x, w] : got.entries()) diff[x] += w;
    for (const auto& [x, w] : want.entries()) diff[x] -= w;
    double worst = 0;
    for (const auto& kv : diff) worst = std::max(worst, std::abs(kv.second));
    return worst <= 1e-9;
  };
  if (!marginal_close(marginal(nu1, 0), mu1) ||
      !marginal_close(marginal(nu2, 1), mu2)) {
    r.reason = Err::kMarginalMismatch;
    r.detail = "witness marginals do not reproduce the endpoints";
    return r;
  }
  r.observed = flavor_divergence(flavor, nu1, nu2);
  ExtReal budget = flavor_budget(flavor);
  if (!(r.observed <= budget + ExtReal(1e-9))) {
    r.reason = Err::kDivergenceExceeded;
    r.detail = "witness divergence exceeds the grade";
    return r;
  }
  r.ok = true;
  return r;
}

// ---------------------------------------------------------------------------
// Empirical validation: run both programs through the oracle and compare
// the observed output divergence against the claimed budget.

struct ValidationReport {
  bool pass = true;
  ExtReal max_observed{0.0};
  ExtReal budget{0.0};
  double slack = 0;
  std::size_t worst_pair = 0;
  std::vector<double> observed;  // per input pair; +inf on support splits
};

inline ValidationReport empirical_validate(
    const Judgment& j, const std::vector<std::pair<Memory, Memory>>& inputs,
    const InterpConfig& cfg) {
  if (j.post.kind != AssnKind::kRel || j.post.cmp != CmpOp::kEq ||
      j.post.left.kind != ExprKind::kVar ||
      j.post.right.kind != ExprKind::kVar)
    fail(Err::kShapeMismatch,
         "empirical validation needs an x<1> == y<2> postcondition");
  Program left{j.ctx, j.left};
  Program right{j.ctx, j.right};
  ValidationReport rep;
  rep.budget = flavor_budget(j.flavor);
  rep.max_observed = ExtReal::neg_inf();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& [m1, m2] = inputs[i];
    if (!eval_assn(j.ctx, m1, m2, j.pre))
      fail(Err::kPreconditionViolated,
           "input pair " + std::to_string(i) +
               " does not satisfy the precondition");
    SubDist out1, out2;
    OracleReport r1 = run_program(left, m1, cfg, &out1);
    OracleReport r2 = run_program(right, m2, cfg, &out2);
    SubDist y1 = project_var(j.ctx, out1, j.post.left.var);
    SubDist y2 = project_var(j.ctx, out2, j.post.right.var);
    ExtReal div = flavor_divergence(j.flavor, y1, y2);
    double slack = 1e-6 + 10 * (r1.dropped_tail + r2.dropped_tail +
                                r1.rounding_dust + r2.rounding_dust +
                                r1.residual_mass + r2.residual_mass);
    rep.slack = std::max(rep.slack, slack);
    rep.observed.push_back(div.is_finite()
                               ? div.value()
                               : std::numeric_limits<double>::infinity());
    if (rep.max_observed < div) {
      rep.max_observed = div;
      rep.worst_pair = i;
    }
    if (!(div <= rep.budget + ExtReal(slack))) rep.pass = false;
  }
  return rep;
}

}  // namespace spanlift
