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

// Sound, incomplete entailment checking between relational assertions.
// The premise is normalized and expanded to disjunctive normal form; each
// cube is preprocessed (constant propagation into indices, update/vector
// projection, componentwise vector equalities) and compiled into linear
// constraints over exact rationals. Goals are discharged by refuting the
// negation with Fourier-Motzkin elimination, by structural congruence for
// boolean terms, or by syntactic match. A result of kUnknown never means
// the entailment is false, only that it was not established.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spanlift/lang.hpp"

namespace spanlift {

enum class Entail { kProved, kUnknown };

inline const char* entail_name(Entail e) {
  return e == Entail::kProved ? "PROVED" : "UNKNOWN";
}

namespace entdetail {

constexpr std::size_t kMaxCubes = 128;
constexpr std::size_t kMaxRows = 4000;

inline Assertion false_atom() {
  return Assertion::rel(Expr::of_int(0), CmpOp::kLt, Expr::of_int(0));
}

inline bool is_cmp(BinOp op) {
  switch (op) {
    case BinOp::kEq:
    case BinOp::kNe:
    case BinOp::kLt:
    case BinOp::kLe:
    case BinOp::kGt:
    case BinOp::kGe: return true;
    default: return false;
  }
}

inline CmpOp cmp_of(BinOp op) {
  switch (op) {
    case BinOp::kEq: return CmpOp::kEq;
    case BinOp::kNe: return CmpOp::kNe;
    case BinOp::kLt: return CmpOp::kLt;
    case BinOp::kLe: return CmpOp::kLe;
    case BinOp::kGt: return CmpOp::kGt;
    default: return CmpOp::kGe;
  }
}

inline BinOp binop_of(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return BinOp::kEq;
    case CmpOp::kNe: return BinOp::kNe;
    case CmpOp::kLt: return BinOp::kLt;
    case CmpOp::kLe: return BinOp::kLe;
    case CmpOp::kGt: return BinOp::kGt;
    case CmpOp::kGe: return BinOp::kGe;
  }
  return BinOp::kEq;
}

// Pushes negation through the boolean structure of a guard expression so
// that guard atoms end up as comparisons or opaque boolean terms.
inline Assertion normalize_guard(const Expr& e, int tag, bool neg) {
  switch (e.kind) {
    case ExprKind::kBoolLit:
      return e.bval != neg ? Assertion::truth() : false_atom();
    case ExprKind::kUnary:
      if (e.uop == UnOp::kNot) return normalize_guard(e.kids[0], tag, !neg);
      break;
    case ExprKind::kBinary: {
      if (e.bop == BinOp::kAnd || e.bop == BinOp::kOr) {
        Assertion l = normalize_guard(e.kids[0], tag, neg);
        Assertion r = normalize_guard(e.kids[1], tag, neg);
        bool conj = (e.bop == BinOp::kAnd) != neg;
        return conj ? Assertion::a_and(std::move(l), std::move(r))
                    : Assertion::a_or(std::move(l), std::move(r));
      }
      if (is_cmp(e.bop)) {
        BinOp op = neg ? binop_of(cmp_negate(cmp_of(e.bop))) : e.bop;
        return Assertion::guard(Expr::binary(op, e.kids[0], e.kids[1]), tag);
      }
      break;
    }
    default: break;
  }
  Assertion g = Assertion::guard(e, tag);
  return neg ? Assertion::a_not(std::move(g)) : g;
}

// Negation normal form with sugar removed: abs bounds become two-run
// inequality pairs and composite guards split into assertion connectives.
inline Assertion normalize(const Assertion& a, bool neg) {
  switch (a.kind) {
    case AssnKind::kTrue: return neg ? false_atom() : a;
    case AssnKind::kRel:
    case AssnKind::kRel2: {
      Assertion out = a;
      if (neg) out.cmp = cmp_negate(a.cmp);
      return out;
    }
    case AssnKind::kGuard: return normalize_guard(a.guard_expr, a.tag, neg);
    case AssnKind::kAbsLe: {
      Assertion up =
          Assertion::rel2(a.left, BinOp::kSub, a.right, CmpOp::kLe,
                          a.bound_expr, BinOp::kAdd, Expr::of_int(0));
      Assertion lo = Assertion::rel2(a.left, BinOp::kSub, a.right, CmpOp::kGe,
                                     Expr::unary(UnOp::kNeg, a.bound_expr),
                                     BinOp::kAdd, Expr::of_int(0));
      if (!neg) return Assertion::a_and(std::move(up), std::move(lo));
      up.cmp = CmpOp::kGt;
      lo.cmp = CmpOp::kLt;
      return Assertion::a_or(std::move(up), std::move(lo));
    }
    case AssnKind::kAnd:
    case AssnKind::kOr: {
      Assertion l = normalize(a.kids[0], neg);
      Assertion r = normalize(a.kids[1], neg);
      bool conj = (a.kind == AssnKind::kAnd) != neg;
      return conj ? Assertion::a_and(std::move(l), std::move(r))
                  : Assertion::a_or(std::move(l), std::move(r));
    }
    case AssnKind::kNot: return normalize(a.kids[0], !neg);
    case AssnKind::kCompose: return neg ? Assertion::a_not(a) : a;
  }
  return a;
}

inline bool dnf(const Assertion& a,
                std::vector<std::vector<Assertion>>& out) {
  switch (a.kind) {
    case AssnKind::kAnd: {
      std::vector<std::vector<Assertion>> l, r;
      if (!dnf(a.kids[0], l) || !dnf(a.kids[1], r)) return false;
      if (l.size() * r.size() + out.size() > kMaxCubes) return false;
      for (const auto& x : l)
        for (const auto& y : r) {
          std::vector<Assertion> cube = x;
          cube.insert(cube.end(), y.begin(), y.end());
          out.push_back(std::move(cube));
        }
      return true;
    }
    case AssnKind::kOr:
      if (!dnf(a.kids[0], out) || !dnf(a.kids[1], out)) return false;
      return out.size() <= kMaxCubes;
    default: out.push_back({a}); return true;
  }
}

// ---------------------------------------------------------------------------
// Per-cube constant propagation.

struct Bindings {
  std::map<std::pair<int, std::string>, Outcome> var;  // (run, name)
  std::map<std::tuple<int, std::string, std::int64_t>, Outcome> slot;
};

inline Expr outcome_to_expr(const Outcome& o) {
  if (o.is_bool()) return Expr::of_bool(o.as_bool());
  if (o.is_int()) return Expr::of_int(o.as_int());
  if (o.is_real()) return Expr::of_real(o.as_real());
  std::vector<Expr> kids;
  for (const auto& e : o.as_tuple()) kids.push_back(outcome_to_expr(e));
  return Expr::veclit(std::move(kids));
}

inline std::optional<std::int64_t> vec_dim(const Context& ctx, const Expr& e) {
  try {
    Ty t = typecheck_expr(ctx, e);
    if (t.is_vector()) return t.dim;
  } catch (const Error&) {
  }
  return std::nullopt;
}

inline bool bool_typed(const Context& ctx, const Expr& e) {
  try {
    Ty t = typecheck_expr(ctx, e);
    return !t.is_vector() && t.base == Base::kBool;
  } catch (const Error&) {
    return false;
  }
}

// Substitutes bound constants, clamps and projects constant indices through
// upd chains and vector literals, and folds constant subterms.
inline Expr simplify_expr(const Context& ctx, const Expr& e0, int tag,
                          const Bindings& b) {
  if (e0.kind == ExprKind::kVar) {
    auto it = b.var.find({tag, e0.var});
    if (it != b.var.end()) return outcome_to_expr(it->second);
    return e0;
  }
  Expr e = e0;
  for (auto& k : e.kids) k = simplify_expr(ctx, k, tag, b);
  for (;;) {
    if (e.kind != ExprKind::kIndex || e.kids[1].kind != ExprKind::kIntLit)
      break;
    auto d = vec_dim(ctx, e.kids[0]);
    if (!d) break;
    std::int64_t j = std::min(std::max<std::int64_t>(e.kids[1].ival, 0), *d - 1);
    e.kids[1] = Expr::of_int(j);
    if (e.kids[0].kind == ExprKind::kVar) {
      auto it = b.slot.find({tag, e.kids[0].var, j});
      if (it != b.slot.end()) return outcome_to_expr(it->second);
      break;
    }
    if (e.kids[0].kind == ExprKind::kUpd &&
        e.kids[0].kids[1].kind == ExprKind::kIntLit) {
      std::int64_t i =
          std::min(std::max<std::int64_t>(e.kids[0].kids[1].ival, 0), *d - 1);
      if (i == j) {
        Expr v = e.kids[0].kids[2];
        e = std::move(v);
        break;
      }
      Expr inner = e.kids[0].kids[0];
      e.kids[0] = std::move(inner);
      continue;
    }
    if (e.kids[0].kind == ExprKind::kVecLit) {
      Expr v = e.kids[0].kids[static_cast<std::size_t>(j)];
      e = std::move(v);
      break;
    }
    break;
  }
  if (e.kind != ExprKind::kIntLit && e.kind != ExprKind::kRealLit &&
      e.kind != ExprKind::kBoolLit) {
    if (auto v = const_eval(e)) return outcome_to_expr(*v);
  }
  return e;
}

inline void collect_bindings(const Context& ctx,
                             const std::vector<Assertion>& atoms,
                             Bindings& b) {
  auto note = [&](int tag, const Expr& lhs, const Outcome& v) {
    if (lhs.kind == ExprKind::kVar) {
      b.var.emplace(std::pair{tag, lhs.var}, v);
      return;
    }
    if (lhs.kind == ExprKind::kIndex && lhs.kids[0].kind == ExprKind::kVar &&
        lhs.kids[1].kind == ExprKind::kIntLit) {
      const Ty* t = ctx.find(lhs.kids[0].var);
      if (!t || !t->is_vector()) return;
      std::int64_t j =
          std::min(std::max<std::int64_t>(lhs.kids[1].ival, 0), t->dim - 1);
      b.slot.emplace(std::tuple{tag, lhs.kids[0].var, j}, v);
    }
  };
  for (const auto& a : atoms) {
    if (a.kind != AssnKind::kRel || a.cmp != CmpOp::kEq) continue;
    auto lv = const_eval(a.left);
    auto rv = const_eval(a.right);
    if (rv && !lv) note(1, a.left, *rv);
    if (lv && !rv) note(2, a.right, *lv);
  }
}

inline Assertion simplify_assertion(const Context& ctx, const Assertion& a,
                                    const Bindings& b) {
  Assertion out = a;
  switch (a.kind) {
    case AssnKind::kTrue: return out;
    case AssnKind::kRel:
      out.left = simplify_expr(ctx, a.left, 1, b);
      out.right = simplify_expr(ctx, a.right, 2, b);
      return out;
    case AssnKind::kRel2:
      out.l1 = simplify_expr(ctx, a.l1, 1, b);
      out.r1 = simplify_expr(ctx, a.r1, 1, b);
      out.l2 = simplify_expr(ctx, a.l2, 2, b);
      out.r2 = simplify_expr(ctx, a.r2, 2, b);
      return out;
    case AssnKind::kGuard:
      out.guard_expr = simplify_expr(ctx, a.guard_expr, a.tag, b);
      return out;
    case AssnKind::kAbsLe:
      out.left = simplify_expr(ctx, a.left, 1, b);
      out.right = simplify_expr(ctx, a.right, 2, b);
      out.bound_expr = simplify_expr(ctx, a.bound_expr, 1, b);
      return out;
    case AssnKind::kCompose: return out;  // matched structurally, keep intact
    default:
      for (auto& k : out.kids) k = simplify_assertion(ctx, k, b);
      return out;
  }
}

// ---------------------------------------------------------------------------
// Linear rows over interned (run, term) columns.

struct Row {
  enum class Rel { kLe, kLt, kEq };
  std::map<int, Rat> coef;
  Rat rhs;
  Rel rel = Rel::kLe;
};

struct Lin {
  bool ok = true;
  Rat c;
  std::map<int, Rat> coef;
};

struct Cube {
  const Context* ctx = nullptr;
  std::vector<Assertion> atoms;
  std::vector<Row> rows;
  std::set<std::pair<int, std::string>> facts_true, facts_false;
  std::set<std::pair<std::string, std::string>> bool_eq;
  Bindings binds;
  bool infeasible = false;  // contradictory premises prove any goal
  std::map<std::string, int> cols;

  int col(int tag, const Expr& e) {
    std::string key = std::to_string(tag) + "|" + print_expr(e);
    auto [it, inserted] = cols.emplace(key, static_cast<int>(cols.size()));
    (void)inserted;
    return it->second;
  }
};

// a += s * o; false (and a.ok cleared) on rational overflow.
inline bool lin_acc(Lin& a, const Lin& o, const Rat& s) {
  if (!a.ok || !o.ok) {
    a.ok = false;
    return false;
  }
  auto t = checked_mul(o.c, s);
  if (!t) {
    a.ok = false;
    return false;
  }
  auto u = checked_add(a.c, *t);
  if (!u) {
    a.ok = false;
    return false;
  }
  a.c = *u;
  for (const auto& [k, v] : o.coef) {
    auto w = checked_mul(v, s);
    if (!w) {
      a.ok = false;
      return false;
    }
    auto z = checked_add(a.coef[k], *w);
    if (!z) {
      a.ok = false;
      return false;
    }
    if (z->is_zero()) {
      a.coef.erase(k);
    } else {
      a.coef[k] = *z;
    }
  }
  return true;
}

// Any numeric expression denotes one value per run, so falling back to a
// single opaque column is always sound.
inline Lin linearize(Cube& cube, const Expr& e, int tag) {
  switch (e.kind) {
    case ExprKind::kIntLit: {
      Lin l;
      l.c = Rat(e.ival);
      return l;
    }
    case ExprKind::kRealLit: {
      Lin l;
      l.c = e.rval;
      return l;
    }
    case ExprKind::kUnary:
      if (e.uop == UnOp::kNeg) {
        Lin k = linearize(cube, e.kids[0], tag);
        Lin out;
        if (k.ok && lin_acc(out, k, Rat(-1))) return out;
      }
      break;
    case ExprKind::kBinary:
      switch (e.bop) {
        case BinOp::kAdd:
        case BinOp::kSub: {
          Lin a = linearize(cube, e.kids[0], tag);
          Lin b = linearize(cube, e.kids[1], tag);
          if (a.ok && b.ok &&
              lin_acc(a, b, Rat(e.bop == BinOp::kAdd ? 1 : -1)))
            return a;
          break;
        }
        case BinOp::kMul: {
          Lin a = linearize(cube, e.kids[0], tag);
          Lin b = linearize(cube, e.kids[1], tag);
          if (a.ok && a.coef.empty()) {
            Lin out;
            if (b.ok && lin_acc(out, b, a.c)) return out;
          }
          if (b.ok && b.coef.empty()) {
            Lin out;
            if (a.ok && lin_acc(out, a, b.c)) return out;
          }
          break;
        }
        case BinOp::kDiv: {
          Lin b = linearize(cube, e.kids[1], tag);
          if (b.ok && b.coef.empty()) {
            if (b.c.is_zero()) return Lin{};  // x / 0 evaluates to 0
            auto inv = checked_div(Rat(1), b.c);
            if (inv) {
              Lin a = linearize(cube, e.kids[0], tag);
              Lin out;
              if (a.ok && lin_acc(out, a, *inv)) return out;
            }
          }
          break;
        }
        default: break;
      }
      break;
    default: break;
  }
  Lin l;
  l.coef[cube.col(tag, e)] = Rat(1);
  return l;
}

// Rows asserting (L - R) cmp 0. kNe carries no linear content (empty set);
// nullopt signals rational overflow.
inline std::optional<std::vector<Row>> rows_of_cmp(const Lin& L, const Lin& R,
                                                   CmpOp op) {
  if (!L.ok || !R.ok) return std::nullopt;
  Lin diff = L;
  if (!lin_acc(diff, R, Rat(-1))) return std::nullopt;
  Rat rhs = rat_neg(diff.c);
  auto flipped = [&]() {
    std::map<int, Rat> coef;
    for (const auto& [k, v] : diff.coef) coef.emplace(k, rat_neg(v));
    return coef;
  };
  std::vector<Row> out;
  switch (op) {
    case CmpOp::kLe: out.push_back({diff.coef, rhs, Row::Rel::kLe}); break;
    case CmpOp::kLt: out.push_back({diff.coef, rhs, Row::Rel::kLt}); break;
    case CmpOp::kGe: out.push_back({flipped(), rat_neg(rhs), Row::Rel::kLe}); break;
    case CmpOp::kGt: out.push_back({flipped(), rat_neg(rhs), Row::Rel::kLt}); break;
    case CmpOp::kEq: out.push_back({diff.coef, rhs, Row::Rel::kEq}); break;
    case CmpOp::kNe: break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin refutation: true iff the rows are jointly infeasible over
// the rationals. Overflow or size blowup gives false (cannot refute).

inline bool refute(std::vector<Row> rows) {
  std::vector<Row> work;
  for (auto& r : rows) {
    if (r.rel == Row::Rel::kEq) {
      Row ge;
      ge.rel = Row::Rel::kLe;
      for (const auto& [k, v] : r.coef) ge.coef.emplace(k, rat_neg(v));
      ge.rhs = rat_neg(r.rhs);
      r.rel = Row::Rel::kLe;
      work.push_back(std::move(r));
      work.push_back(std::move(ge));
    } else {
      work.push_back(std::move(r));
    }
  }
  for (;;) {
    std::vector<Row> rest;
    for (auto& r : work) {
      if (!r.coef.empty()) {
        rest.push_back(std::move(r));
        continue;
      }
      int cm = compare(Rat(0), r.rhs);
      bool holds = r.rel == Row::Rel::kLt ? cm < 0 : cm <= 0;
      if (!holds) return true;
    }
    if (rest.empty()) return false;
    work = std::move(rest);

    std::map<int, std::pair<std::size_t, std::size_t>> uses;  // (lowers, uppers)
    for (const auto& r : work)
      for (const auto& [k, v] : r.coef)
        (v.num > 0 ? uses[k].second : uses[k].first)++;
    int best = -1;
    std::size_t best_cost = 0;
    for (const auto& [k, lu] : uses) {
      std::size_t cost = lu.first * lu.second;
      if (best < 0 || cost < best_cost) {
        best = k;
        best_cost = cost;
      }
    }

    std::vector<Row> lowers, uppers, keep;
    for (auto& r : work) {
      auto it = r.coef.find(best);
      if (it == r.coef.end()) {
        keep.push_back(std::move(r));
        continue;
      }
      (it->second.num > 0 ? uppers : lowers).push_back(std::move(r));
    }
    if (keep.size() + lowers.size() * uppers.size() > kMaxRows) return false;
    for (const auto& u : uppers) {
      Rat a = u.coef.at(best);
      for (const auto& l : lowers) {
        Rat bneg = rat_neg(l.coef.at(best));
        Row n;
        n.rel = (u.rel == Row::Rel::kLt || l.rel == Row::Rel::kLt)
                    ? Row::Rel::kLt
                    : Row::Rel::kLe;
        bool ok = true;
        auto acc = [&](const Row& src, const Rat& s) {
          if (!ok) return;
          for (const auto& [k, v] : src.coef) {
            if (k == best) continue;
            auto w = checked_mul(v, s);
            if (!w) {
              ok = false;
              return;
            }
            auto z = checked_add(n.coef[k], *w);
            if (!z) {
              ok = false;
              return;
            }
            if (z->is_zero()) {
              n.coef.erase(k);
            } else {
              n.coef[k] = *z;
            }
          }
          auto w = checked_mul(src.rhs, s);
          if (!w) {
            ok = false;
            return;
          }
          auto z = checked_add(n.rhs, *w);
          if (!z) {
            ok = false;
            return;
          }
          n.rhs = *z;
        };
        acc(u, bneg);
        acc(l, a);
        // Overflowing combinations are dropped; the weaker system can only
        // fail to refute, never refute wrongly.
        if (ok) keep.push_back(std::move(n));
      }
    }
    work = std::move(keep);
    if (work.empty()) return false;
  }
}

// ---------------------------------------------------------------------------
// Cube construction.

inline void add_guard_fact(Cube& c, const Expr& e, int tag, bool value) {
  if (e.kind == ExprKind::kBoolLit) {
    if (e.bval != value) c.rows.push_back(Row{{}, Rat(-1), Row::Rel::kLe});
    return;
  }
  if (e.kind == ExprKind::kUnary && e.uop == UnOp::kNot) {
    add_guard_fact(c, e.kids[0], tag, !value);
    return;
  }
  if (e.kind == ExprKind::kBinary && is_cmp(e.bop) &&
      !bool_typed(*c.ctx, e.kids[0])) {
    CmpOp op = cmp_of(e.bop);
    if (!value) op = cmp_negate(op);
    Lin L = linearize(c, e.kids[0], tag);
    Lin R = linearize(c, e.kids[1], tag);
    if (auto rows = rows_of_cmp(L, R, op))
      for (auto& r : *rows) c.rows.push_back(std::move(r));
  }
  (value ? c.facts_true : c.facts_false).insert({tag, print_expr(e)});
}

inline void add_atom(Cube& c, const Assertion& a) {
  c.atoms.push_back(a);
  switch (a.kind) {
    case AssnKind::kTrue: return;
    case AssnKind::kRel: {
      bool lb = bool_typed(*c.ctx, a.left);
      bool rb = bool_typed(*c.ctx, a.right);
      if (lb || rb) {
        if (a.cmp != CmpOp::kEq) return;
        if (a.right.kind == ExprKind::kBoolLit) {
          add_guard_fact(c, a.left, 1, a.right.bval);
          return;
        }
        if (a.left.kind == ExprKind::kBoolLit) {
          add_guard_fact(c, a.right, 2, a.left.bval);
          return;
        }
        c.bool_eq.insert({print_expr(a.left), print_expr(a.right)});
        return;
      }
      auto ld = vec_dim(*c.ctx, a.left);
      auto rd = vec_dim(*c.ctx, a.right);
      if (ld || rd) {
        if (a.cmp != CmpOp::kEq || !ld || !rd || *ld != *rd) return;
        for (std::int64_t j = 0; j < *ld; ++j) {
          Assertion comp = Assertion::rel(
              simplify_expr(*c.ctx, Expr::index(a.left, Expr::of_int(j)), 1,
                            c.binds),
              CmpOp::kEq,
              simplify_expr(*c.ctx, Expr::index(a.right, Expr::of_int(j)), 2,
                            c.binds));
          add_atom(c, comp);
        }
        return;
      }
      Lin L = linearize(c, a.left, 1);
      Lin R = linearize(c, a.right, 2);
      if (auto rows = rows_of_cmp(L, R, a.cmp))
        for (auto& r : *rows) c.rows.push_back(std::move(r));
      return;
    }
    case AssnKind::kRel2: {
      Lin L = linearize(c, a.l1, 1);
      Lin l2 = linearize(c, a.l2, 2);
      if (!lin_acc(L, l2, Rat(a.lop == BinOp::kAdd ? 1 : -1))) return;
      Lin R = linearize(c, a.r1, 1);
      Lin r2 = linearize(c, a.r2, 2);
      if (!lin_acc(R, r2, Rat(a.rop == BinOp::kAdd ? 1 : -1))) return;
      if (auto rows = rows_of_cmp(L, R, a.cmp))
        for (auto& r : *rows) c.rows.push_back(std::move(r));
      return;
    }
    case AssnKind::kGuard:
      add_guard_fact(c, a.guard_expr, a.tag, true);
      return;
    case AssnKind::kNot:
      if (a.kids[0].kind == AssnKind::kGuard)
        add_guard_fact(c, a.kids[0].guard_expr, a.kids[0].tag, false);
      return;
    case AssnKind::kAbsLe: {
      // Normalized premises desugar these; handle direct cubes anyway.
      Lin L = linearize(c, a.left, 1);
      Lin R = linearize(c, a.right, 2);
      Lin D = L;
      if (!lin_acc(D, R, Rat(-1))) return;
      Lin B = linearize(c, a.bound_expr, 1);
      if (auto rows = rows_of_cmp(D, B, CmpOp::kLe))
        for (auto& r : *rows) c.rows.push_back(std::move(r));
      Lin negB;
      if (!lin_acc(negB, B, Rat(-1))) return;
      if (auto rows = rows_of_cmp(negB, D, CmpOp::kLe))
        for (auto& r : *rows) c.rows.push_back(std::move(r));
      return;
    }
    case AssnKind::kAnd:
      add_atom(c, a.kids[0]);
      add_atom(c, a.kids[1]);
      return;
    default: return;  // kOr cannot appear inside a cube; kCompose is opaque
  }
}

inline Cube build_cube(const Context& ctx, std::vector<Assertion> atoms) {
  Bindings b;
  for (int pass = 0; pass < 3; ++pass) {
    collect_bindings(ctx, atoms, b);
    for (auto& a : atoms) a = simplify_assertion(ctx, a, b);
  }
  Cube c;
  c.ctx = &ctx;
  c.binds = std::move(b);
  for (const auto& a : atoms) add_atom(c, a);
  c.infeasible = refute(c.rows);
  return c;
}

// ---------------------------------------------------------------------------
// Goal proving against one cube.

inline bool prove_rows(Cube& c, const std::vector<Row>& extra) {
  std::vector<Row> rows = c.rows;
  rows.insert(rows.end(), extra.begin(), extra.end());
  return refute(std::move(rows));
}

inline bool prove_cmp_lin(Cube& c, const Lin& L, const Lin& R, CmpOp op) {
  auto run = [&](CmpOp negated) {
    auto rows = rows_of_cmp(L, R, negated);
    return rows.has_value() && prove_rows(c, *rows);
  };
  switch (op) {
    case CmpOp::kLe: return run(CmpOp::kGt);
    case CmpOp::kLt: return run(CmpOp::kGe);
    case CmpOp::kGe: return run(CmpOp::kLt);
    case CmpOp::kGt: return run(CmpOp::kLe);
    case CmpOp::kEq: return run(CmpOp::kLt) && run(CmpOp::kGt);
    case CmpOp::kNe: return run(CmpOp::kEq);
  }
  return false;
}

inline bool prove_guard_value(Cube& c, const Expr& e, int tag, bool value) {
  if (e.kind == ExprKind::kBoolLit) return e.bval == value;
  if (e.kind == ExprKind::kUnary && e.uop == UnOp::kNot)
    return prove_guard_value(c, e.kids[0], tag, !value);
  if (e.kind == ExprKind::kBinary && is_cmp(e.bop) &&
      !bool_typed(*c.ctx, e.kids[0])) {
    CmpOp op = cmp_of(e.bop);
    if (!value) op = cmp_negate(op);
    Lin L = linearize(c, e.kids[0], tag);
    Lin R = linearize(c, e.kids[1], tag);
    return prove_cmp_lin(c, L, R, op);
  }
  if (e.kind == ExprKind::kBinary &&
      (e.bop == BinOp::kAnd || e.bop == BinOp::kOr)) {
    bool need_both = (e.bop == BinOp::kAnd) == value;
    if (need_both)
      return prove_guard_value(c, e.kids[0], tag, value) &&
             prove_guard_value(c, e.kids[1], tag, value);
    return prove_guard_value(c, e.kids[0], tag, value) ||
           prove_guard_value(c, e.kids[1], tag, value);
  }
  return (value ? c.facts_true : c.facts_false)
             .count({tag, print_expr(e)}) > 0;
}

inline bool prove_num_eq_cross(Cube& c, const Expr& l, const Expr& r) {
  Lin L = linearize(c, l, 1);
  Lin R = linearize(c, r, 2);
  return prove_cmp_lin(c, L, R, CmpOp::kEq);
}

// l in run 1 equals r in run 2, both bool-typed: congruence over the
// boolean structure with numeric leaves discharged linearly.
inline bool prove_bool_eq(Cube& c, const Expr& l, const Expr& r) {
  if (c.bool_eq.count({print_expr(l), print_expr(r)})) return true;
  if (l.kind == ExprKind::kBoolLit) return prove_guard_value(c, r, 2, l.bval);
  if (r.kind == ExprKind::kBoolLit) return prove_guard_value(c, l, 1, r.bval);
  if (l.kind == ExprKind::kUnary && r.kind == ExprKind::kUnary &&
      l.uop == UnOp::kNot && r.uop == UnOp::kNot)
    return prove_bool_eq(c, l.kids[0], r.kids[0]);
  if (l.kind == ExprKind::kBinary && r.kind == ExprKind::kBinary &&
      l.bop == r.bop) {
    if (is_cmp(l.bop)) {
      if (bool_typed(*c.ctx, l.kids[0]) || bool_typed(*c.ctx, r.kids[0]))
        return prove_bool_eq(c, l.kids[0], r.kids[0]) &&
               prove_bool_eq(c, l.kids[1], r.kids[1]);
      return prove_num_eq_cross(c, l.kids[0], r.kids[0]) &&
             prove_num_eq_cross(c, l.kids[1], r.kids[1]);
    }
    if (l.bop == BinOp::kAnd || l.bop == BinOp::kOr)
      return prove_bool_eq(c, l.kids[0], r.kids[0]) &&
             prove_bool_eq(c, l.kids[1], r.kids[1]);
  }
  return false;
}

inline bool prove(Cube& c, const Assertion& g) {
  if (c.infeasible) return true;
  for (const auto& a : c.atoms)
    if (assn_equal(a, g)) return true;
  switch (g.kind) {
    case AssnKind::kTrue: return true;
    case AssnKind::kAnd: return prove(c, g.kids[0]) && prove(c, g.kids[1]);
    case AssnKind::kOr: return prove(c, g.kids[0]) || prove(c, g.kids[1]);
    case AssnKind::kRel: {
      bool lb = bool_typed(*c.ctx, g.left);
      bool rb = bool_typed(*c.ctx, g.right);
      if (lb || rb) {
        if (g.cmp == CmpOp::kEq) return prove_bool_eq(c, g.left, g.right);
        return false;
      }
      auto ld = vec_dim(*c.ctx, g.left);
      auto rd = vec_dim(*c.ctx, g.right);
      if (ld || rd) {
        if (g.cmp != CmpOp::kEq || !ld || !rd || *ld != *rd) return false;
        for (std::int64_t j = 0; j < *ld; ++j) {
          Expr le = simplify_expr(*c.ctx, Expr::index(g.left, Expr::of_int(j)),
                                  1, c.binds);
          Expr re = simplify_expr(
              *c.ctx, Expr::index(g.right, Expr::of_int(j)), 2, c.binds);
          if (!prove(c, Assertion::rel(std::move(le), CmpOp::kEq,
                                       std::move(re))))
            return false;
        }
        return true;
      }
      Lin L = linearize(c, g.left, 1);
      Lin R = linearize(c, g.right, 2);
      return prove_cmp_lin(c, L, R, g.cmp);
    }
    case AssnKind::kRel2: {
      Lin L = linearize(c, g.l1, 1);
      Lin l2 = linearize(c, g.l2, 2);
      if (!lin_acc(L, l2, Rat(g.lop == BinOp::kAdd ? 1 : -1))) return false;
      Lin R = linearize(c, g.r1, 1);
      Lin r2 = linearize(c, g.r2, 2);
      if (!lin_acc(R, r2, Rat(g.rop == BinOp::kAdd ? 1 : -1))) return false;
      return prove_cmp_lin(c, L, R, g.cmp);
    }
    case AssnKind::kGuard:
      return prove_guard_value(c, g.guard_expr, g.tag, true);
    case AssnKind::kNot:
      if (g.kids[0].kind == AssnKind::kGuard)
        return prove_guard_value(c, g.kids[0].guard_expr, g.kids[0].tag,
                                 false);
      return false;
    case AssnKind::kAbsLe: return prove(c, normalize(g, false));
    case AssnKind::kCompose: return false;  // syntactic match only
  }
  return false;
}

}  // namespace entdetail

// Establishes premise => goal, or reports kUnknown. Sound: kProved is only
// returned when every premise cube forces the goal.
inline Entail entails(const Context& ctx, const Assertion& premise,
                      const Assertion& goal) {
  using namespace entdetail;
  Assertion pn = normalize(premise, false);
  Assertion gn = normalize(goal, false);
  std::vector<std::vector<Assertion>> cubes;
  if (!dnf(pn, cubes)) return Entail::kUnknown;
  for (auto& atoms : cubes) {
    Cube cube = build_cube(ctx, std::move(atoms));
    Assertion g = gn;
    for (int i = 0; i < 3; ++i) g = simplify_assertion(ctx, g, cube.binds);
    if (!prove(cube, g)) return Entail::kUnknown;
  }
  return Entail::kProved;
}

}  // namespace spanlift
