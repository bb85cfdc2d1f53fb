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
#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spanlift/dist.hpp"
#include "spanlift/error.hpp"
#include "spanlift/rational.hpp"

namespace spanlift {

// ---------------------------------------------------------------------------
// Types and contexts.

enum class Base { kBool, kInt, kReal };

struct Ty {
  Base base = Base::kInt;
  std::int64_t dim = 0;  // 0: scalar; d >= 1: vector of length d
  bool is_vector() const { return dim > 0; }
  Ty element() const { return {base, 0}; }
  friend bool operator==(const Ty& a, const Ty& b) {
    return a.base == b.base && a.dim == b.dim;
  }
  friend bool operator!=(const Ty& a, const Ty& b) { return !(a == b); }
};

inline std::string ty_name(const Ty& t) {
  std::string s = t.base == Base::kBool ? "bool"
                  : t.base == Base::kInt ? "int"
                                         : "real";
  if (t.is_vector()) s += "[" + std::to_string(t.dim) + "]";
  return s;
}

// Ordered variable declarations; memory layout follows declaration order.
struct Context {
  std::vector<std::pair<std::string, Ty>> vars;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].first == name) return static_cast<int>(i);
    return -1;
  }
  const Ty* find(const std::string& name) const {
    int i = index_of(name);
    return i < 0 ? nullptr : &vars[static_cast<std::size_t>(i)].second;
  }
  void declare(const std::string& name, Ty ty, int line = -1, int col = -1) {
    if (index_of(name) >= 0)
      fail(Err::kSyntaxError, "duplicate variable: " + name, line, col);
    vars.emplace_back(name, ty);
  }
};

// ---------------------------------------------------------------------------
// Expressions.

enum class ExprKind {
  kBoolLit,
  kIntLit,
  kRealLit,
  kVar,
  kIndex,   // kids: {vec, idx}
  kUnary,   // kids: {arg}
  kBinary,  // kids: {lhs, rhs}
  kUpd,     // kids: {vec, idx, value}
  kVecLit,  // kids: elements
};

enum class UnOp { kNeg, kNot };
enum class BinOp {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMin,
  kMax,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
};

struct Expr {
  ExprKind kind = ExprKind::kIntLit;
  bool bval = false;
  std::int64_t ival = 0;
  Rat rval;
  std::string var;
  UnOp uop = UnOp::kNeg;
  BinOp bop = BinOp::kAdd;
  std::vector<Expr> kids;
  int line = -1, col = -1;

  static Expr of_bool(bool b) {
    Expr e;
    e.kind = ExprKind::kBoolLit;
    e.bval = b;
    return e;
  }
  static Expr of_int(std::int64_t v) {
    Expr e;
    e.kind = ExprKind::kIntLit;
    e.ival = v;
    return e;
  }
  static Expr of_real(Rat r) {
    Expr e;
    e.kind = ExprKind::kRealLit;
    e.rval = r;
    return e;
  }
  static Expr of_var(std::string name) {
    Expr e;
    e.kind = ExprKind::kVar;
    e.var = std::move(name);
    return e;
  }
  static Expr index(Expr vec, Expr idx) {
    Expr e;
    e.kind = ExprKind::kIndex;
    e.kids = {std::move(vec), std::move(idx)};
    return e;
  }
  static Expr unary(UnOp op, Expr a) {
    Expr e;
    e.kind = ExprKind::kUnary;
    e.uop = op;
    e.kids = {std::move(a)};
    return e;
  }
  static Expr binary(BinOp op, Expr a, Expr b) {
    Expr e;
    e.kind = ExprKind::kBinary;
    e.bop = op;
    e.kids = {std::move(a), std::move(b)};
    return e;
  }
  static Expr upd(Expr vec, Expr idx, Expr val) {
    Expr e;
    e.kind = ExprKind::kUpd;
    e.kids = {std::move(vec), std::move(idx), std::move(val)};
    return e;
  }
  static Expr veclit(std::vector<Expr> elems) {
    Expr e;
    e.kind = ExprKind::kVecLit;
    e.kids = std::move(elems);
    return e;
  }
};

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::kBoolLit: return a.bval == b.bval;
    case ExprKind::kIntLit: return a.ival == b.ival;
    case ExprKind::kRealLit: return a.rval == b.rval;
    case ExprKind::kVar: return a.var == b.var;
    case ExprKind::kUnary:
      if (a.uop != b.uop) return false;
      break;
    case ExprKind::kBinary:
      if (a.bop != b.bop) return false;
      break;
    default: break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!expr_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Probabilistic expressions (samplers) and commands.

struct PExpr {
  enum class Kind { kDirac, kBern, kLap, kGauss, kSinhGauss };
  Kind kind = Kind::kDirac;
  std::vector<Expr> args;
  int line = -1, col = -1;
};

inline const char* pexpr_name(PExpr::Kind k) {
  switch (k) {
    case PExpr::Kind::kDirac: return "dirac";
    case PExpr::Kind::kBern: return "bern";
    case PExpr::Kind::kLap: return "lap";
    case PExpr::Kind::kGauss: return "gauss";
    case PExpr::Kind::kSinhGauss: return "sinh_gauss";
  }
  return "?";
}

inline bool pexpr_equal(const PExpr& a, const PExpr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(a.args[i], b.args[i])) return false;
  return true;
}

struct Cmd {
  enum class Kind { kSkip, kAssign, kSample, kSeq, kIte, kWhile };
  Kind kind = Kind::kSkip;
  std::string target;                 // assign / sample
  std::optional<Expr> rhs;            // assign
  std::optional<PExpr> dist;          // sample
  std::optional<Expr> guard;          // ite / while
  std::vector<Cmd> kids;              // seq: {first, second}; ite: {then, else}; while: {body}
  std::optional<std::int64_t> bound;  // while annotation
  bool index_sugar = false;           // assign written as target[i] <- e
  int line = -1, col = -1;

  static Cmd skip() { return Cmd{}; }
  static Cmd assign(std::string x, Expr e, bool sugar = false) {
    Cmd c;
    c.kind = Kind::kAssign;
    c.target = std::move(x);
    c.rhs = std::move(e);
    c.index_sugar = sugar;
    return c;
  }
  static Cmd sample(std::string x, PExpr pe) {
    Cmd c;
    c.kind = Kind::kSample;
    c.target = std::move(x);
    c.dist = std::move(pe);
    return c;
  }
  static Cmd seq(Cmd a, Cmd b) {
    Cmd c;
    c.kind = Kind::kSeq;
    c.kids = {std::move(a), std::move(b)};
    return c;
  }
  static Cmd ite(Expr g, Cmd thn, Cmd els) {
    Cmd c;
    c.kind = Kind::kIte;
    c.guard = std::move(g);
    c.kids = {std::move(thn), std::move(els)};
    return c;
  }
  static Cmd loop(Expr g, Cmd body, std::optional<std::int64_t> bound) {
    Cmd c;
    c.kind = Kind::kWhile;
    c.guard = std::move(g);
    c.kids = {std::move(body)};
    c.bound = bound;
    return c;
  }
};

inline bool cmd_equal(const Cmd& a, const Cmd& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Cmd::Kind::kSkip: return true;
    case Cmd::Kind::kAssign:
      return a.target == b.target && expr_equal(*a.rhs, *b.rhs);
    case Cmd::Kind::kSample:
      return a.target == b.target && pexpr_equal(*a.dist, *b.dist);
    case Cmd::Kind::kSeq: break;
    case Cmd::Kind::kIte:
    case Cmd::Kind::kWhile:
      if (!expr_equal(*a.guard, *b.guard)) return false;
      if (a.kind == Cmd::Kind::kWhile && a.bound != b.bound) return false;
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!cmd_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

struct Program {
  Context ctx;
  Cmd body;
};

// ---------------------------------------------------------------------------
// Tokenizer (shared by programs and assertions).

struct Token {
  enum class Kind { kIdent, kInt, kReal, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  int line = 1, col = 1;
};

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto peek = [&](std::size_t k = 0) -> char {
    return i + k < src.size() ? src[i + k] : '\0';
  };
  auto advance = [&]() {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  while (i < src.size()) {
    char c = peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && peek() != '\n') advance();
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(peek())) ||
              peek() == '_')) {
        s += peek();
        advance();
      }
      t.kind = Token::Kind::kIdent;
      t.text = s;
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      bool real = false;
      while (i < src.size() &&
             (std::isdigit(static_cast<unsigned char>(peek())) ||
              (!real && peek() == '.' &&
               std::isdigit(static_cast<unsigned char>(peek(1)))))) {
        if (peek() == '.') real = true;
        s += peek();
        advance();
      }
      t.kind = real ? Token::Kind::kReal : Token::Kind::kInt;
      t.text = s;
      out.push_back(t);
      continue;
    }
    // Multi-character punctuation, longest first.
    static const char* kPuncts[] = {"<-$", "<-", "==", "!=", "<=", ">=",
                                    "&&",  "||", "{",  "}",  "(",  ")",
                                    "[",   "]",  ";",  ":",  ",",  "@",
                                    "<",   ">",  "+",  "-",  "*",  "/",
                                    "!",   "="};
    bool matched = false;
    for (const char* p : kPuncts) {
      std::size_t n = std::char_traits<char>::length(p);
      if (src.compare(i, n, p) == 0) {
        t.kind = Token::Kind::kPunct;
        t.text = p;
        for (std::size_t k = 0; k < n; ++k) advance();
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched)
      fail(Err::kSyntaxError, std::string("unexpected character '") + c + "'",
           line, col);
  }
  Token end;
  end.kind = Token::Kind::kEnd;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser.

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& cur() const { return toks_[pos_]; }
  std::size_t save() const { return pos_; }
  void restore(std::size_t p) { pos_ = p; }

  bool at_end() const { return cur().kind == Token::Kind::kEnd; }

  bool accept(const std::string& punct_or_kw) {
    const Token& t = cur();
    if ((t.kind == Token::Kind::kPunct || t.kind == Token::Kind::kIdent) &&
        t.text == punct_or_kw) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool peek_is(const std::string& s, std::size_t ahead = 0) const {
    const Token& t = toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    return (t.kind == Token::Kind::kPunct || t.kind == Token::Kind::kIdent) &&
           t.text == s;
  }
  void expect(const std::string& s, const char* what) {
    if (!accept(s))
      fail(Err::kSyntaxError,
           std::string("expected '") + s + "' (" + what + "), found '" +
               cur().text + "'",
           cur().line, cur().col);
  }
  std::string expect_ident(const char* what) {
    if (cur().kind != Token::Kind::kIdent)
      fail(Err::kSyntaxError,
           std::string("expected ") + what + ", found '" + cur().text + "'",
           cur().line, cur().col);
    std::string s = cur().text;
    ++pos_;
    return s;
  }
  std::int64_t expect_int(const char* what) {
    bool neg = false;
    if (peek_is("-")) {
      ++pos_;
      neg = true;
    }
    if (cur().kind != Token::Kind::kInt)
      fail(Err::kSyntaxError,
           std::string("expected integer ") + what + ", found '" + cur().text +
               "'",
           cur().line, cur().col);
    std::int64_t v = std::stoll(cur().text);
    ++pos_;
    return neg ? -v : v;
  }

  // Expression grammar (no '@' handling here; assertions stop before '@').
  Expr parse_expr() { return parse_or(); }

  // Assertion terms stop below comparisons and boolean connectives so that
  // ==, &&, and || keep their assertion-level meaning; parenthesize to embed
  // them in a term.
  Expr parse_term_expr() { return parse_add(); }

  Expr parse_or() {
    Expr e = parse_and();
    while (peek_is("||")) {
      int ln = cur().line, cl = cur().col;
      ++pos_;
      Expr r = parse_and();
      e = Expr::binary(BinOp::kOr, std::move(e), std::move(r));
      e.line = ln;
      e.col = cl;
    }
    return e;
  }
  Expr parse_and() {
    Expr e = parse_cmp();
    while (peek_is("&&")) {
      int ln = cur().line, cl = cur().col;
      ++pos_;
      Expr r = parse_cmp();
      e = Expr::binary(BinOp::kAnd, std::move(e), std::move(r));
      e.line = ln;
      e.col = cl;
    }
    return e;
  }
  Expr parse_cmp() {
    Expr e = parse_add();
    static const std::pair<const char*, BinOp> kOps[] = {
        {"==", BinOp::kEq}, {"!=", BinOp::kNe}, {"<=", BinOp::kLe},
        {">=", BinOp::kGe}, {"<", BinOp::kLt},  {">", BinOp::kGt}};
    for (const auto& [txt, op] : kOps) {
      if (peek_is(txt)) {
        int ln = cur().line, cl = cur().col;
        ++pos_;
        Expr r = parse_add();
        Expr out = Expr::binary(op, std::move(e), std::move(r));
        out.line = ln;
        out.col = cl;
        return out;
      }
    }
    return e;
  }
  Expr parse_add() {
    Expr e = parse_mul();
    while (peek_is("+") || peek_is("-")) {
      BinOp op = peek_is("+") ? BinOp::kAdd : BinOp::kSub;
      int ln = cur().line, cl = cur().col;
      ++pos_;
      Expr r = parse_mul();
      e = Expr::binary(op, std::move(e), std::move(r));
      e.line = ln;
      e.col = cl;
    }
    return e;
  }
  Expr parse_mul() {
    Expr e = parse_unary();
    while (peek_is("*") || peek_is("/")) {
      BinOp op = peek_is("*") ? BinOp::kMul : BinOp::kDiv;
      int ln = cur().line, cl = cur().col;
      ++pos_;
      Expr r = parse_unary();
      e = Expr::binary(op, std::move(e), std::move(r));
      e.line = ln;
      e.col = cl;
    }
    return e;
  }
  Expr parse_unary() {
    int ln = cur().line, cl = cur().col;
    if (accept("-")) {
      // Negative literals fold; anything else keeps the unary node.
      if (cur().kind == Token::Kind::kInt) {
        Expr e = Expr::of_int(-std::stoll(cur().text));
        e.line = ln;
        e.col = cl;
        ++pos_;
        return parse_postfix_on(std::move(e));
      }
      if (cur().kind == Token::Kind::kReal) {
        auto r = Rat::parse("-" + cur().text);
        if (!r)
          fail(Err::kSyntaxError, "bad real literal", cur().line, cur().col);
        Expr e = Expr::of_real(*r);
        e.line = ln;
        e.col = cl;
        ++pos_;
        return parse_postfix_on(std::move(e));
      }
      Expr e = Expr::unary(UnOp::kNeg, parse_unary());
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("!")) {
      Expr e = Expr::unary(UnOp::kNot, parse_unary());
      e.line = ln;
      e.col = cl;
      return e;
    }
    return parse_postfix();
  }
  Expr parse_postfix() { return parse_postfix_on(parse_primary()); }
  Expr parse_postfix_on(Expr e) {
    while (peek_is("[")) {
      int ln = cur().line, cl = cur().col;
      ++pos_;
      Expr idx = parse_expr();
      expect("]", "index");
      e = Expr::index(std::move(e), std::move(idx));
      e.line = ln;
      e.col = cl;
    }
    return e;
  }
  Expr parse_primary() {
    const Token& t = cur();
    int ln = t.line, cl = t.col;
    if (t.kind == Token::Kind::kInt) {
      ++pos_;
      Expr e = Expr::of_int(std::stoll(t.text));
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (t.kind == Token::Kind::kReal) {
      auto r = Rat::parse(t.text);
      if (!r) fail(Err::kSyntaxError, "bad real literal", ln, cl);
      ++pos_;
      Expr e = Expr::of_real(*r);
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("true")) {
      Expr e = Expr::of_bool(true);
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("false")) {
      Expr e = Expr::of_bool(false);
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("min") || (t.text == "max" && accept("max"))) {
      BinOp op = t.text == "min" ? BinOp::kMin : BinOp::kMax;
      expect("(", "min/max");
      Expr a = parse_expr();
      expect(",", "min/max");
      Expr b = parse_expr();
      expect(")", "min/max");
      Expr e = Expr::binary(op, std::move(a), std::move(b));
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("upd")) {
      expect("(", "upd");
      Expr v = parse_expr();
      expect(",", "upd");
      Expr idx = parse_expr();
      expect(",", "upd");
      Expr val = parse_expr();
      expect(")", "upd");
      Expr e = Expr::upd(std::move(v), std::move(idx), std::move(val));
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (accept("(")) {
      Expr e = parse_expr();
      expect(")", "parenthesized expression");
      return e;
    }
    if (accept("[")) {
      std::vector<Expr> elems;
      elems.push_back(parse_expr());
      while (accept(",")) elems.push_back(parse_expr());
      expect("]", "vector literal");
      Expr e = Expr::veclit(std::move(elems));
      e.line = ln;
      e.col = cl;
      return e;
    }
    if (t.kind == Token::Kind::kIdent) {
      ++pos_;
      Expr e = Expr::of_var(t.text);
      e.line = ln;
      e.col = cl;
      return e;
    }
    fail(Err::kSyntaxError, "expected expression, found '" + t.text + "'", ln,
         cl);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {
      "vars",  "skip",  "if",    "else", "while",      "bound", "true",
      "false", "min",   "max",   "upd",  "bool",       "int",   "real",
      "dirac", "bern",  "lap",   "gauss", "sinh_gauss", "abs",  "adj",
      "adjb",  "compose"};
  return kw.count(s) > 0;
}

}  // namespace detail

// Parses "vars { x, y : real; i : int; D : real[4]; } <stmts>".
inline Program parse_program(const std::string& src) {
  detail::Parser p(tokenize(src));
  Program prog;
  p.expect("vars", "program header");
  p.expect("{", "declaration block");
  while (!p.accept("}")) {
    std::vector<std::string> names;
    names.push_back(p.expect_ident("variable name"));
    while (p.accept(",")) names.push_back(p.expect_ident("variable name"));
    p.expect(":", "declaration");
    Ty ty;
    if (p.accept("bool")) {
      ty.base = Base::kBool;
    } else if (p.accept("int")) {
      ty.base = Base::kInt;
    } else if (p.accept("real")) {
      ty.base = Base::kReal;
    } else {
      fail(Err::kSyntaxError, "expected type, found '" + p.cur().text + "'",
           p.cur().line, p.cur().col);
    }
    if (p.accept("[")) {
      ty.dim = p.expect_int("vector length");
      if (ty.dim < 1)
        fail(Err::kSyntaxError, "vector length must be >= 1", p.cur().line,
             p.cur().col);
      p.expect("]", "vector type");
    }
    p.expect(";", "declaration");
    for (auto& n : names) {
      if (detail::is_keyword(n))
        fail(Err::kSyntaxError, "reserved word used as variable: " + n);
      prog.ctx.declare(n, ty, p.cur().line, p.cur().col);
    }
  }
  p.accept(";");

  // Statement parsing, right-folding sequences.
  struct CmdParser {
    detail::Parser& p;

    Cmd parse_stmts(const std::string& terminator) {
      std::vector<Cmd> cmds;
      while (!p.at_end() && !(terminator == "}" && p.peek_is("}")))
        cmds.push_back(parse_stmt());
      if (cmds.empty()) return Cmd::skip();
      Cmd out = cmds.back();
      for (std::size_t i = cmds.size() - 1; i-- > 0;)
        out = Cmd::seq(cmds[i], std::move(out));
      return out;
    }

    Cmd parse_block() {
      p.expect("{", "block");
      Cmd c = parse_stmts("}");
      p.expect("}", "block");
      return c;
    }

    Cmd parse_stmt() {
      int ln = p.cur().line, cl = p.cur().col;
      if (p.accept("skip")) {
        p.expect(";", "skip");
        Cmd c = Cmd::skip();
        c.line = ln;
        c.col = cl;
        return c;
      }
      if (p.accept("if")) {
        Expr g = p.parse_expr();
        Cmd thn = parse_block();
        p.expect("else", "if statement");
        Cmd els = parse_block();
        Cmd c = Cmd::ite(std::move(g), std::move(thn), std::move(els));
        c.line = ln;
        c.col = cl;
        return c;
      }
      if (p.accept("while")) {
        Expr g = p.parse_expr();
        std::optional<std::int64_t> bound;
        if (p.accept("bound")) bound = p.expect_int("loop bound");
        Cmd body = parse_block();
        Cmd c = Cmd::loop(std::move(g), std::move(body), bound);
        c.line = ln;
        c.col = cl;
        return c;
      }
      std::string name = p.expect_ident("assignment target");
      if (detail::is_keyword(name))
        fail(Err::kSyntaxError, "unexpected keyword '" + name + "'", ln, cl);
      if (p.accept("[")) {
        Expr idx = p.parse_expr();
        p.expect("]", "indexed assignment");
        p.expect("<-", "indexed assignment");
        Expr val = p.parse_expr();
        p.expect(";", "assignment");
        // target[i] <- e is sugar for target <- upd(target, i, e).
        Cmd c = Cmd::assign(
            name, Expr::upd(Expr::of_var(name), std::move(idx), std::move(val)),
            /*sugar=*/true);
        c.line = ln;
        c.col = cl;
        return c;
      }
      if (p.accept("<-$")) {
        PExpr pe = parse_pexpr();
        p.expect(";", "sample statement");
        Cmd c = Cmd::sample(name, std::move(pe));
        c.line = ln;
        c.col = cl;
        return c;
      }
      p.expect("<-", "assignment");
      Expr e = p.parse_expr();
      p.expect(";", "assignment");
      Cmd c = Cmd::assign(name, std::move(e));
      c.line = ln;
      c.col = cl;
      return c;
    }

    PExpr parse_pexpr() {
      PExpr pe;
      pe.line = p.cur().line;
      pe.col = p.cur().col;
      if (p.accept("dirac")) {
        pe.kind = PExpr::Kind::kDirac;
      } else if (p.accept("bern")) {
        pe.kind = PExpr::Kind::kBern;
      } else if (p.accept("lap")) {
        pe.kind = PExpr::Kind::kLap;
      } else if (p.accept("gauss")) {
        pe.kind = PExpr::Kind::kGauss;
      } else if (p.accept("sinh_gauss")) {
        pe.kind = PExpr::Kind::kSinhGauss;
      } else {
        fail(Err::kSyntaxError, "expected sampler, found '" + p.cur().text + "'",
             p.cur().line, p.cur().col);
      }
      p.expect("(", "sampler");
      pe.args.push_back(p.parse_expr());
      while (p.accept(",")) pe.args.push_back(p.parse_expr());
      p.expect(")", "sampler");
      return pe;
    }
  };

  CmdParser cp{p};
  prog.body = cp.parse_stmts("");
  if (!p.at_end())
    fail(Err::kSyntaxError, "trailing input: '" + p.cur().text + "'",
         p.cur().line, p.cur().col);
  return prog;
}

// ---------------------------------------------------------------------------
// Printer. print/parse round-trips structurally.

namespace detail {

inline int precedence(BinOp op) {
  switch (op) {
    case BinOp::kOr: return 1;
    case BinOp::kAnd: return 2;
    case BinOp::kEq:
    case BinOp::kNe:
    case BinOp::kLt:
    case BinOp::kLe:
    case BinOp::kGt:
    case BinOp::kGe: return 3;
    case BinOp::kAdd:
    case BinOp::kSub: return 4;
    case BinOp::kMul:
    case BinOp::kDiv: return 5;
    case BinOp::kMin:
    case BinOp::kMax: return 7;
  }
  return 7;
}

inline const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "+";
    case BinOp::kSub: return "-";
    case BinOp::kMul: return "*";
    case BinOp::kDiv: return "/";
    case BinOp::kMin: return "min";
    case BinOp::kMax: return "max";
    case BinOp::kEq: return "==";
    case BinOp::kNe: return "!=";
    case BinOp::kLt: return "<";
    case BinOp::kLe: return "<=";
    case BinOp::kGt: return ">";
    case BinOp::kGe: return ">=";
    case BinOp::kAnd: return "&&";
    case BinOp::kOr: return "||";
  }
  return "?";
}

}  // namespace detail

inline std::string print_rat(const Rat& r) {
  // Integers print as "n.0" so they re-tokenize as reals; other rationals
  // print exactly when they have a finite decimal form, else as "a/b" which
  // only appears inside generated content.
  if (r.den == 1) return std::to_string(r.num) + ".0";
  // den = 2^a 5^b has an exact decimal expansion.
  std::int64_t d = r.den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d == 1) {
    int digits = std::max(twos, fives);
    if (digits <= 18) {
      __int128 scale = 1;
      for (int i = 0; i < digits; ++i) scale *= 10;
      __int128 scaled = static_cast<__int128>(r.num) * (scale / r.den);
      bool neg = scaled < 0;
      if (neg) scaled = -scaled;
      std::string frac;
      for (int i = 0; i < digits; ++i) {
        frac += static_cast<char>('0' + static_cast<int>(scaled % 10));
        scaled /= 10;
      }
      std::reverse(frac.begin(), frac.end());
      std::string whole;
      if (scaled == 0) {
        whole = "0";
      } else {
        while (scaled > 0) {
          whole += static_cast<char>('0' + static_cast<int>(scaled % 10));
          scaled /= 10;
        }
        std::reverse(whole.begin(), whole.end());
      }
      return (neg ? "-" : "") + whole + "." + frac;
    }
  }
  return r.to_string();
}

inline std::string print_expr(const Expr& e, int parent_prec = 0) {
  switch (e.kind) {
    case ExprKind::kBoolLit: return e.bval ? "true" : "false";
    case ExprKind::kIntLit: return std::to_string(e.ival);
    case ExprKind::kRealLit: return print_rat(e.rval);
    case ExprKind::kVar: return e.var;
    case ExprKind::kIndex:
      return print_expr(e.kids[0], 8) + "[" + print_expr(e.kids[1]) + "]";
    case ExprKind::kUnary: {
      std::string s = (e.uop == UnOp::kNeg ? "-" : "!") +
                      print_expr(e.kids[0], 6);
      return parent_prec > 5 ? "(" + s + ")" : s;
    }
    case ExprKind::kBinary: {
      if (e.bop == BinOp::kMin || e.bop == BinOp::kMax) {
        return std::string(detail::binop_text(e.bop)) + "(" +
               print_expr(e.kids[0]) + ", " + print_expr(e.kids[1]) + ")";
      }
      int prec = detail::precedence(e.bop);
      std::string s = print_expr(e.kids[0], prec) + " " +
                      detail::binop_text(e.bop) + " " +
                      print_expr(e.kids[1], prec + 1);
      return prec < parent_prec ? "(" + s + ")" : s;
    }
    case ExprKind::kUpd:
      return "upd(" + print_expr(e.kids[0]) + ", " + print_expr(e.kids[1]) +
             ", " + print_expr(e.kids[2]) + ")";
    case ExprKind::kVecLit: {
      std::string s = "[";
      for (std::size_t i = 0; i < e.kids.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(e.kids[i]);
      }
      return s + "]";
    }
  }
  return "?";
}

inline std::string print_pexpr(const PExpr& pe) {
  std::string s = std::string(pexpr_name(pe.kind)) + "(";
  for (std::size_t i = 0; i < pe.args.size(); ++i) {
    if (i) s += ", ";
    s += print_expr(pe.args[i]);
  }
  return s + ")";
}

inline void print_cmd_into(const Cmd& c, std::string& out,
                           const std::string& indent) {
  switch (c.kind) {
    case Cmd::Kind::kSkip:
      out += indent + "skip;\n";
      return;
    case Cmd::Kind::kAssign:
      if (c.index_sugar && c.rhs->kind == ExprKind::kUpd &&
          c.rhs->kids[0].kind == ExprKind::kVar &&
          c.rhs->kids[0].var == c.target) {
        out += indent + c.target + "[" + print_expr(c.rhs->kids[1]) + "] <- " +
               print_expr(c.rhs->kids[2]) + ";\n";
      } else {
        out += indent + c.target + " <- " + print_expr(*c.rhs) + ";\n";
      }
      return;
    case Cmd::Kind::kSample:
      out += indent + c.target + " <-$ " + print_pexpr(*c.dist) + ";\n";
      return;
    case Cmd::Kind::kSeq:
      print_cmd_into(c.kids[0], out, indent);
      print_cmd_into(c.kids[1], out, indent);
      return;
    case Cmd::Kind::kIte:
      out += indent + "if " + print_expr(*c.guard) + " {\n";
      print_cmd_into(c.kids[0], out, indent + "  ");
      out += indent + "} else {\n";
      print_cmd_into(c.kids[1], out, indent + "  ");
      out += indent + "}\n";
      return;
    case Cmd::Kind::kWhile:
      out += indent + "while " + print_expr(*c.guard);
      if (c.bound) out += " bound " + std::to_string(*c.bound);
      out += " {\n";
      print_cmd_into(c.kids[0], out, indent + "  ");
      out += indent + "}\n";
      return;
  }
}

inline std::string print_program(const Program& prog) {
  std::string out = "vars {\n";
  for (const auto& [name, ty] : prog.ctx.vars)
    out += "  " + name + " : " + ty_name(ty) + ";\n";
  out += "}\n";
  print_cmd_into(prog.body, out, "");
  return out;
}

// ---------------------------------------------------------------------------
// Typechecking.

inline Ty typecheck_expr(const Context& ctx, const Expr& e) {
  auto numeric = [](const Ty& t) {
    return !t.is_vector() && t.base != Base::kBool;
  };
  auto promote = [&](const Ty& a, const Ty& b, const Expr& at) -> Ty {
    if (!numeric(a) || !numeric(b))
      fail(Err::kTypeMismatch, "numeric operands required", at.line, at.col);
    return (a.base == Base::kReal || b.base == Base::kReal)
               ? Ty{Base::kReal, 0}
               : Ty{Base::kInt, 0};
  };
  switch (e.kind) {
    case ExprKind::kBoolLit: return {Base::kBool, 0};
    case ExprKind::kIntLit: return {Base::kInt, 0};
    case ExprKind::kRealLit: return {Base::kReal, 0};
    case ExprKind::kVar: {
      const Ty* t = ctx.find(e.var);
      if (!t) fail(Err::kUnboundVariable, "unbound variable: " + e.var, e.line,
                   e.col);
      return *t;
    }
    case ExprKind::kIndex: {
      Ty vt = typecheck_expr(ctx, e.kids[0]);
      if (!vt.is_vector())
        fail(Err::kShapeError, "indexing a non-vector", e.line, e.col);
      Ty it = typecheck_expr(ctx, e.kids[1]);
      if (it.is_vector() || it.base != Base::kInt)
        fail(Err::kTypeMismatch, "index must be int", e.line, e.col);
      return vt.element();
    }
    case ExprKind::kUnary: {
      Ty t = typecheck_expr(ctx, e.kids[0]);
      if (e.uop == UnOp::kNeg) {
        if (!numeric(t))
          fail(Err::kTypeMismatch, "negation needs a numeric operand", e.line,
               e.col);
        return t;
      }
      if (t.is_vector() || t.base != Base::kBool)
        fail(Err::kTypeMismatch, "'!' needs a bool operand", e.line, e.col);
      return t;
    }
    case ExprKind::kBinary: {
      Ty a = typecheck_expr(ctx, e.kids[0]);
      Ty b = typecheck_expr(ctx, e.kids[1]);
      switch (e.bop) {
        case BinOp::kAdd:
        case BinOp::kSub:
        case BinOp::kMul:
        case BinOp::kMin:
        case BinOp::kMax: return promote(a, b, e);
        case BinOp::kDiv:
          promote(a, b, e);
          return {Base::kReal, 0};
        case BinOp::kEq:
        case BinOp::kNe:
          if (a.is_vector() || b.is_vector())
            fail(Err::kTypeMismatch,
                 "vector comparison is not an expression", e.line, e.col);
          if (a.base == Base::kBool || b.base == Base::kBool) {
            if (a != b)
              fail(Err::kTypeMismatch, "comparing bool with non-bool", e.line,
                   e.col);
          } else {
            promote(a, b, e);
          }
          return {Base::kBool, 0};
        case BinOp::kLt:
        case BinOp::kLe:
        case BinOp::kGt:
        case BinOp::kGe:
          promote(a, b, e);
          return {Base::kBool, 0};
        case BinOp::kAnd:
        case BinOp::kOr:
          if (a.is_vector() || a.base != Base::kBool || b != a)
            fail(Err::kTypeMismatch, "'&&'/'||' need bool operands", e.line,
                 e.col);
          return {Base::kBool, 0};
      }
      fail(Err::kTypeMismatch, "unknown operator", e.line, e.col);
    }
    case ExprKind::kUpd: {
      Ty vt = typecheck_expr(ctx, e.kids[0]);
      if (!vt.is_vector())
        fail(Err::kShapeError, "upd needs a vector", e.line, e.col);
      Ty it = typecheck_expr(ctx, e.kids[1]);
      if (it.is_vector() || it.base != Base::kInt)
        fail(Err::kTypeMismatch, "upd index must be int", e.line, e.col);
      Ty et = typecheck_expr(ctx, e.kids[2]);
      Ty elem = vt.element();
      bool ok = et == elem || (elem.base == Base::kReal && !et.is_vector() &&
                               et.base == Base::kInt);
      if (!ok)
        fail(Err::kTypeMismatch, "upd value type mismatch", e.line, e.col);
      return vt;
    }
    case ExprKind::kVecLit: {
      if (e.kids.empty())
        fail(Err::kShapeError, "empty vector literal", e.line, e.col);
      Ty t0 = typecheck_expr(ctx, e.kids[0]);
      if (t0.is_vector())
        fail(Err::kShapeError, "nested vector literal", e.line, e.col);
      for (const auto& k : e.kids) {
        Ty t = typecheck_expr(ctx, k);
        if (t != t0)
          fail(Err::kTypeMismatch, "mixed element types in vector literal",
               e.line, e.col);
      }
      return {t0.base, static_cast<std::int64_t>(e.kids.size())};
    }
  }
  fail(Err::kTypeMismatch, "unknown expression", e.line, e.col);
}

inline bool assignable(const Ty& target, const Ty& value) {
  if (target == value) return true;
  // int widens to real, scalars only.
  return !target.is_vector() && !value.is_vector() &&
         target.base == Base::kReal && value.base == Base::kInt;
}

inline void typecheck_pexpr(const Context& ctx, const PExpr& pe,
                            const Ty& target) {
  auto num = [&](const Expr& a) {
    Ty t = typecheck_expr(ctx, a);
    if (t.is_vector() || t.base == Base::kBool)
      fail(Err::kTypeMismatch,
           std::string(pexpr_name(pe.kind)) + " parameter must be numeric",
           a.line, a.col);
  };
  auto arity = [&](std::size_t n) {
    if (pe.args.size() != n)
      fail(Err::kInvalidParam,
           std::string(pexpr_name(pe.kind)) + " takes " + std::to_string(n) +
               " argument(s)",
           pe.line, pe.col);
  };
  if (target.is_vector())
    fail(Err::kTypeMismatch, "sampling into a vector variable", pe.line,
         pe.col);
  switch (pe.kind) {
    case PExpr::Kind::kDirac: {
      arity(1);
      Ty t = typecheck_expr(ctx, pe.args[0]);
      if (!assignable(target, t))
        fail(Err::kTypeMismatch, "dirac argument type mismatch", pe.line,
             pe.col);
      return;
    }
    case PExpr::Kind::kBern:
      arity(1);
      if (target.base != Base::kBool)
        fail(Err::kTypeMismatch, "bern samples into a bool", pe.line, pe.col);
      num(pe.args[0]);
      return;
    case PExpr::Kind::kLap:
    case PExpr::Kind::kGauss:
      arity(2);
      if (target.base != Base::kReal)
        fail(Err::kTypeMismatch, "continuous sampler needs a real target",
             pe.line, pe.col);
      num(pe.args[0]);
      num(pe.args[1]);
      return;
    case PExpr::Kind::kSinhGauss:
      arity(3);
      if (target.base != Base::kReal)
        fail(Err::kTypeMismatch, "continuous sampler needs a real target",
             pe.line, pe.col);
      num(pe.args[0]);
      num(pe.args[1]);
      num(pe.args[2]);
      return;
  }
}

inline void typecheck_cmd(const Context& ctx, const Cmd& c) {
  switch (c.kind) {
    case Cmd::Kind::kSkip: return;
    case Cmd::Kind::kAssign: {
      const Ty* t = ctx.find(c.target);
      if (!t)
        fail(Err::kUnboundVariable, "unbound variable: " + c.target, c.line,
             c.col);
      Ty e = typecheck_expr(ctx, *c.rhs);
      if (!assignable(*t, e)) {
        // Two vectors of different lengths is a shape problem, not a type one.
        Err code = t->is_vector() && e.is_vector() && t->base == e.base
                       ? Err::kShapeError
                       : Err::kTypeMismatch;
        fail(code,
             "cannot assign " + ty_name(e) + " to " + c.target + " : " +
                 ty_name(*t),
             c.line, c.col);
      }
      return;
    }
    case Cmd::Kind::kSample: {
      const Ty* t = ctx.find(c.target);
      if (!t)
        fail(Err::kUnboundVariable, "unbound variable: " + c.target, c.line,
             c.col);
      typecheck_pexpr(ctx, *c.dist, *t);
      return;
    }
    case Cmd::Kind::kSeq:
      typecheck_cmd(ctx, c.kids[0]);
      typecheck_cmd(ctx, c.kids[1]);
      return;
    case Cmd::Kind::kIte:
    case Cmd::Kind::kWhile: {
      Ty g = typecheck_expr(ctx, *c.guard);
      if (g.is_vector() || g.base != Base::kBool)
        fail(Err::kGuardNotBool, "guard must be bool", c.line, c.col);
      if (c.kind == Cmd::Kind::kWhile && c.bound && *c.bound < 0)
        fail(Err::kInvalidParam, "loop bound must be >= 0", c.line, c.col);
      for (const auto& k : c.kids) typecheck_cmd(ctx, k);
      return;
    }
  }
}

inline void typecheck_program(const Program& prog) {
  typecheck_cmd(prog.ctx, prog.body);
}

// ---------------------------------------------------------------------------
// Expression evaluation over memories.

// A memory assigns every context variable an outcome, in declaration order;
// vector variables hold tuple outcomes of their declared length.
using Memory = std::vector<Outcome>;

inline Outcome zero_value(const Ty& t) {
  if (t.is_vector()) {
    Outcome::Tuple tup(static_cast<std::size_t>(t.dim),
                       zero_value(t.element()));
    return Outcome::of_tuple(std::move(tup));
  }
  switch (t.base) {
    case Base::kBool: return Outcome::of_bool(false);
    case Base::kInt: return Outcome::of_int(0);
    case Base::kReal: return Outcome::of_real(Rat(0));
  }
  return Outcome::of_int(0);
}

inline Memory zero_memory(const Context& ctx) {
  Memory m;
  m.reserve(ctx.vars.size());
  for (const auto& [_, ty] : ctx.vars) m.push_back(zero_value(ty));
  return m;
}

// Rounding policy for real arithmetic that escapes int64 rationals: round
// the double-precision result to the nearest multiple of `quantum` and track
// the discrepancy in `dust`. Without a policy, overflow is an error.
struct Rounding {
  Rat quantum;
  double* dust = nullptr;
};

namespace detail {

inline std::int64_t clamp_index(std::int64_t k, std::int64_t n) {
  return std::min(std::max<std::int64_t>(k, 0), n - 1);
}

inline Rat rat_op(BinOp op, const Rat& a, const Rat& b, const Rounding* r,
                  int line, int col) {
  std::optional<Rat> v;
  switch (op) {
    case BinOp::kAdd: v = checked_add(a, b); break;
    case BinOp::kSub: v = checked_sub(a, b); break;
    case BinOp::kMul: v = checked_mul(a, b); break;
    case BinOp::kDiv:
      if (b.is_zero()) return Rat(0);  // division by zero yields 0
      v = checked_div(a, b);
      break;
    case BinOp::kMin: return a <= b ? a : b;
    case BinOp::kMax: return a >= b ? a : b;
    default: fail(Err::kInvalidParam, "not an arithmetic operator", line, col);
  }
  if (v) return *v;
  if (!r) fail(Err::kInvalidParam, "rational overflow in evaluation", line, col);
  double ad = a.to_double(), bd = b.to_double();
  double approx;
  switch (op) {
    case BinOp::kAdd: approx = ad + bd; break;
    case BinOp::kSub: approx = ad - bd; break;
    case BinOp::kMul: approx = ad * bd; break;
    default: approx = ad / bd; break;
  }
  Rat rounded = round_to_quantum(approx, r->quantum);
  if (r->dust) *r->dust += std::abs(rounded.to_double() - approx);
  return rounded;
}

inline std::int64_t int_op(BinOp op, std::int64_t a, std::int64_t b, int line,
                           int col) {
  __int128 v;
  switch (op) {
    case BinOp::kAdd: v = static_cast<__int128>(a) + b; break;
    case BinOp::kSub: v = static_cast<__int128>(a) - b; break;
    case BinOp::kMul: v = static_cast<__int128>(a) * b; break;
    case BinOp::kMin: return std::min(a, b);
    case BinOp::kMax: return std::max(a, b);
    default: fail(Err::kInvalidParam, "not an int operator", line, col);
  }
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    fail(Err::kInvalidParam, "integer overflow in evaluation", line, col);
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

inline Outcome eval_expr(const Context& ctx, const Memory& m, const Expr& e,
                         const Rounding* rounding = nullptr) {
  switch (e.kind) {
    case ExprKind::kBoolLit: return Outcome::of_bool(e.bval);
    case ExprKind::kIntLit: return Outcome::of_int(e.ival);
    case ExprKind::kRealLit: return Outcome::of_real(e.rval);
    case ExprKind::kVar: {
      int i = ctx.index_of(e.var);
      if (i < 0)
        fail(Err::kUnboundVariable, "unbound variable: " + e.var, e.line,
             e.col);
      return m[static_cast<std::size_t>(i)];
    }
    case ExprKind::kIndex: {
      Outcome v = eval_expr(ctx, m, e.kids[0], rounding);
      Outcome k = eval_expr(ctx, m, e.kids[1], rounding);
      const auto& t = v.as_tuple();
      if (t.empty()) fail(Err::kShapeError, "indexing an empty vector");
      auto idx = detail::clamp_index(k.as_int(),
                                     static_cast<std::int64_t>(t.size()));
      return t[static_cast<std::size_t>(idx)];
    }
    case ExprKind::kUnary: {
      Outcome v = eval_expr(ctx, m, e.kids[0], rounding);
      if (e.uop == UnOp::kNot) return Outcome::of_bool(!v.as_bool());
      if (v.is_int())
        return Outcome::of_int(
            detail::int_op(BinOp::kSub, 0, v.as_int(), e.line, e.col));
      return Outcome::of_real(rat_neg(v.as_real()));
    }
    case ExprKind::kBinary: {
      if (e.bop == BinOp::kAnd || e.bop == BinOp::kOr) {
        bool a = eval_expr(ctx, m, e.kids[0], rounding).as_bool();
        bool b = eval_expr(ctx, m, e.kids[1], rounding).as_bool();
        return Outcome::of_bool(e.bop == BinOp::kAnd ? (a && b) : (a || b));
      }
      Outcome a = eval_expr(ctx, m, e.kids[0], rounding);
      Outcome b = eval_expr(ctx, m, e.kids[1], rounding);
      switch (e.bop) {
        case BinOp::kEq:
        case BinOp::kNe: {
          bool eq;
          if (a.is_bool() || b.is_bool()) {
            eq = a.as_bool() == b.as_bool();
          } else {
            eq = compare(a.as_rat(), b.as_rat()) == 0;
          }
          return Outcome::of_bool(e.bop == BinOp::kEq ? eq : !eq);
        }
        case BinOp::kLt:
        case BinOp::kLe:
        case BinOp::kGt:
        case BinOp::kGe: {
          int c = compare(a.as_rat(), b.as_rat());
          bool r = e.bop == BinOp::kLt   ? c < 0
                   : e.bop == BinOp::kLe ? c <= 0
                   : e.bop == BinOp::kGt ? c > 0
                                         : c >= 0;
          return Outcome::of_bool(r);
        }
        default: break;
      }
      // Arithmetic: ints stay ints except for '/', which is real division.
      if (a.is_int() && b.is_int() && e.bop != BinOp::kDiv)
        return Outcome::of_int(
            detail::int_op(e.bop, a.as_int(), b.as_int(), e.line, e.col));
      return Outcome::of_real(detail::rat_op(e.bop, a.as_rat(), b.as_rat(),
                                             rounding, e.line, e.col));
    }
    case ExprKind::kUpd: {
      Outcome v = eval_expr(ctx, m, e.kids[0], rounding);
      Outcome k = eval_expr(ctx, m, e.kids[1], rounding);
      Outcome val = eval_expr(ctx, m, e.kids[2], rounding);
      Outcome::Tuple t = v.as_tuple();
      if (t.empty()) fail(Err::kShapeError, "upd on an empty vector");
      auto idx = detail::clamp_index(k.as_int(),
                                     static_cast<std::int64_t>(t.size()));
      // Widen ints stored into real vectors.
      if (t[0].is_real() && val.is_int()) val = Outcome::of_real(val.as_rat());
      t[static_cast<std::size_t>(idx)] = std::move(val);
      return Outcome::of_tuple(std::move(t));
    }
    case ExprKind::kVecLit: {
      Outcome::Tuple t;
      t.reserve(e.kids.size());
      for (const auto& k : e.kids) t.push_back(eval_expr(ctx, m, k, rounding));
      return Outcome::of_tuple(std::move(t));
    }
  }
  fail(Err::kInvalidParam, "unknown expression", e.line, e.col);
}

// Evaluates an expression with no free variables; nullopt when variables
// appear or exact arithmetic overflows.
inline std::optional<Outcome> const_eval(const Expr& e) {
  static const Context kEmpty{};
  try {
    return eval_expr(kEmpty, {}, e, nullptr);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::optional<Rat> const_eval_rat(const Expr& e) {
  auto v = const_eval(e);
  if (!v || !v->is_numeric()) return std::nullopt;
  return v->as_rat();
}

// Free variables of an expression.
inline void fv_expr(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::kVar) out.insert(e.var);
  for (const auto& k : e.kids) fv_expr(k, out);
}

// Capture-free substitution of a variable by an expression.
inline Expr subst_expr(const Expr& e, const std::string& var,
                       const Expr& replacement) {
  if (e.kind == ExprKind::kVar && e.var == var) return replacement;
  Expr out = e;
  for (auto& k : out.kids) k = subst_expr(k, var, replacement);
  return out;
}

// ---------------------------------------------------------------------------
// Relational assertions over pairs of runs. Every leaf expression belongs to
// run 1 or run 2; kRel relates a run-1 expression with a run-2 expression.

enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

inline CmpOp cmp_negate(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return CmpOp::kNe;
    case CmpOp::kNe: return CmpOp::kEq;
    case CmpOp::kLt: return CmpOp::kGe;
    case CmpOp::kLe: return CmpOp::kGt;
    case CmpOp::kGt: return CmpOp::kLe;
    case CmpOp::kGe: return CmpOp::kLt;
  }
  return CmpOp::kEq;
}

enum class AssnKind {
  kTrue,
  kRel,      // left@1 cmp right@2
  kRel2,     // (l1@1 lop l2@2) cmp (r1@1 rop r2@2), lop/rop in {+, -}
  kGuard,    // expr@tag, bool-typed
  kAbsLe,    // abs(left@1 - right@2) <= bound (bound on run 1 / constant)
  kAnd,
  kOr,
  kNot,
  kCompose,  // compose(A; B): relational composition, checked structurally
};

struct Assertion {
  AssnKind kind = AssnKind::kTrue;
  CmpOp cmp = CmpOp::kEq;
  Expr left, right;   // kRel, kAbsLe
  Expr bound_expr;    // kAbsLe
  Expr l1, l2, r1, r2;  // kRel2
  BinOp lop = BinOp::kAdd, rop = BinOp::kAdd;
  Expr guard_expr;    // kGuard
  int tag = 1;        // kGuard
  std::vector<Assertion> kids;  // kAnd/kOr: 2, kNot: 1, kCompose: 2
  int line = -1, col = -1;

  static Assertion truth() { return Assertion{}; }
  static Assertion rel(Expr l, CmpOp op, Expr r) {
    Assertion a;
    a.kind = AssnKind::kRel;
    a.cmp = op;
    a.left = std::move(l);
    a.right = std::move(r);
    return a;
  }
  static Assertion rel2(Expr l1, BinOp lop, Expr l2, CmpOp op, Expr r1,
                        BinOp rop, Expr r2) {
    Assertion a;
    a.kind = AssnKind::kRel2;
    a.cmp = op;
    a.l1 = std::move(l1);
    a.l2 = std::move(l2);
    a.r1 = std::move(r1);
    a.r2 = std::move(r2);
    a.lop = lop;
    a.rop = rop;
    return a;
  }
  static Assertion guard(Expr e, int tag) {
    Assertion a;
    a.kind = AssnKind::kGuard;
    a.guard_expr = std::move(e);
    a.tag = tag;
    return a;
  }
  static Assertion abs_le(Expr l, Expr r, Expr bound) {
    Assertion a;
    a.kind = AssnKind::kAbsLe;
    a.left = std::move(l);
    a.right = std::move(r);
    a.bound_expr = std::move(bound);
    return a;
  }
  static Assertion a_and(Assertion x, Assertion y) {
    Assertion a;
    a.kind = AssnKind::kAnd;
    a.kids = {std::move(x), std::move(y)};
    return a;
  }
  static Assertion a_or(Assertion x, Assertion y) {
    Assertion a;
    a.kind = AssnKind::kOr;
    a.kids = {std::move(x), std::move(y)};
    return a;
  }
  static Assertion a_not(Assertion x) {
    Assertion a;
    a.kind = AssnKind::kNot;
    a.kids = {std::move(x)};
    return a;
  }
  static Assertion compose(Assertion x, Assertion y) {
    Assertion a;
    a.kind = AssnKind::kCompose;
    a.kids = {std::move(x), std::move(y)};
    return a;
  }
};

inline bool assn_equal(const Assertion& a, const Assertion& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case AssnKind::kTrue: return true;
    case AssnKind::kRel:
      return a.cmp == b.cmp && expr_equal(a.left, b.left) &&
             expr_equal(a.right, b.right);
    case AssnKind::kRel2:
      return a.cmp == b.cmp && a.lop == b.lop && a.rop == b.rop &&
             expr_equal(a.l1, b.l1) && expr_equal(a.l2, b.l2) &&
             expr_equal(a.r1, b.r1) && expr_equal(a.r2, b.r2);
    case AssnKind::kGuard:
      return a.tag == b.tag && expr_equal(a.guard_expr, b.guard_expr);
    case AssnKind::kAbsLe:
      return expr_equal(a.left, b.left) && expr_equal(a.right, b.right) &&
             expr_equal(a.bound_expr, b.bound_expr);
    default: break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!assn_equal(a.kids[i], b.kids[i])) return false;
  return true;
}

inline std::string print_assertion(const Assertion& a) {
  switch (a.kind) {
    case AssnKind::kTrue: return "true";
    case AssnKind::kRel:
      // Terms print below the comparison level (parenthesized when compound)
      // so the relational operators cannot be captured by the term grammar.
      return print_expr(a.left, 6) + "@1 " + cmp_text(a.cmp) + " " +
             print_expr(a.right, 6) + "@2";
    case AssnKind::kRel2:
      return "(" + print_expr(a.l1, 6) + "@1 " +
             (a.lop == BinOp::kAdd ? "+" : "-") + " " + print_expr(a.l2, 6) +
             "@2) " + cmp_text(a.cmp) + " (" + print_expr(a.r1, 6) + "@1 " +
             (a.rop == BinOp::kAdd ? "+" : "-") + " " + print_expr(a.r2, 6) +
             "@2)";
    case AssnKind::kGuard:
      return print_expr(a.guard_expr, 8) + "@" + std::to_string(a.tag);
    case AssnKind::kAbsLe:
      return "abs(" + print_expr(a.left, 6) + "@1 - " +
             print_expr(a.right, 6) + "@2) <= " + print_expr(a.bound_expr, 6);
    case AssnKind::kAnd:
      return "(" + print_assertion(a.kids[0]) + " && " +
             print_assertion(a.kids[1]) + ")";
    case AssnKind::kOr:
      return "(" + print_assertion(a.kids[0]) + " || " +
             print_assertion(a.kids[1]) + ")";
    case AssnKind::kNot: return "!(" + print_assertion(a.kids[0]) + ")";
    case AssnKind::kCompose:
      return "compose(" + print_assertion(a.kids[0]) + "; " +
             print_assertion(a.kids[1]) + ")";
  }
  return "?";
}

// Typechecks every embedded expression; both runs share one context.
inline void typecheck_assertion(const Context& ctx, const Assertion& a) {
  auto numeric_scalar = [&](const Expr& e) {
    Ty t = typecheck_expr(ctx, e);
    if (t.is_vector() || t.base == Base::kBool)
      fail(Err::kTypeMismatch, "numeric scalar required in assertion", e.line,
           e.col);
  };
  switch (a.kind) {
    case AssnKind::kTrue: return;
    case AssnKind::kRel: {
      Ty l = typecheck_expr(ctx, a.left);
      Ty r = typecheck_expr(ctx, a.right);
      if (a.cmp == CmpOp::kEq || a.cmp == CmpOp::kNe) {
        bool ok = (l == r) || (!l.is_vector() && !r.is_vector() &&
                               l.base != Base::kBool && r.base != Base::kBool);
        if (!ok)
          fail(Err::kTypeMismatch, "incomparable types in relation", a.line,
               a.col);
      } else {
        numeric_scalar(a.left);
        numeric_scalar(a.right);
      }
      return;
    }
    case AssnKind::kRel2:
      numeric_scalar(a.l1);
      numeric_scalar(a.l2);
      numeric_scalar(a.r1);
      numeric_scalar(a.r2);
      return;
    case AssnKind::kGuard: {
      if (a.tag != 1 && a.tag != 2)
        fail(Err::kBadTag, "tag must be 1 or 2", a.line, a.col);
      Ty t = typecheck_expr(ctx, a.guard_expr);
      if (t.is_vector() || t.base != Base::kBool)
        fail(Err::kTypeMismatch, "guard assertion must be bool", a.line,
             a.col);
      return;
    }
    case AssnKind::kAbsLe:
      numeric_scalar(a.left);
      numeric_scalar(a.right);
      numeric_scalar(a.bound_expr);
      return;
    default:
      for (const auto& k : a.kids) typecheck_assertion(ctx, k);
      return;
  }
}

// Truth of an assertion on a concrete pair of memories. Compose has no
// pairwise truth value (it quantifies over an intermediate run).
inline bool eval_assn(const Context& ctx, const Memory& m1, const Memory& m2,
                      const Assertion& a) {
  auto cmp_outcomes = [](const Outcome& x, const Outcome& y, CmpOp op) {
    if (op == CmpOp::kEq || op == CmpOp::kNe) {
      bool eq;
      if (x.is_numeric() && y.is_numeric()) {
        eq = compare(x.as_rat(), y.as_rat()) == 0;
      } else {
        eq = x == y;
      }
      return op == CmpOp::kEq ? eq : !eq;
    }
    int c = compare(x.as_rat(), y.as_rat());
    switch (op) {
      case CmpOp::kLt: return c < 0;
      case CmpOp::kLe: return c <= 0;
      case CmpOp::kGt: return c > 0;
      case CmpOp::kGe: return c >= 0;
      default: return false;
    }
  };
  switch (a.kind) {
    case AssnKind::kTrue: return true;
    case AssnKind::kRel:
      return cmp_outcomes(eval_expr(ctx, m1, a.left),
                          eval_expr(ctx, m2, a.right), a.cmp);
    case AssnKind::kRel2: {
      Rat l1 = eval_expr(ctx, m1, a.l1).as_rat();
      Rat l2 = eval_expr(ctx, m2, a.l2).as_rat();
      Rat r1 = eval_expr(ctx, m1, a.r1).as_rat();
      Rat r2 = eval_expr(ctx, m2, a.r2).as_rat();
      auto lv = a.lop == BinOp::kAdd ? checked_add(l1, l2)
                                     : checked_sub(l1, l2);
      auto rv = a.rop == BinOp::kAdd ? checked_add(r1, r2)
                                     : checked_sub(r1, r2);
      if (!lv || !rv)
        fail(Err::kInvalidParam, "rational overflow in assertion", a.line,
             a.col);
      return cmp_outcomes(Outcome::of_real(*lv), Outcome::of_real(*rv), a.cmp);
    }
    case AssnKind::kGuard:
      return eval_expr(ctx, a.tag == 1 ? m1 : m2, a.guard_expr).as_bool();
    case AssnKind::kAbsLe: {
      Rat l = eval_expr(ctx, m1, a.left).as_rat();
      Rat r = eval_expr(ctx, m2, a.right).as_rat();
      Rat b = eval_expr(ctx, m1, a.bound_expr).as_rat();
      auto d = checked_sub(l, r);
      if (!d)
        fail(Err::kInvalidParam, "rational overflow in assertion", a.line,
             a.col);
      return rat_abs(*d) <= b;
    }
    case AssnKind::kAnd:
      return eval_assn(ctx, m1, m2, a.kids[0]) &&
             eval_assn(ctx, m1, m2, a.kids[1]);
    case AssnKind::kOr:
      return eval_assn(ctx, m1, m2, a.kids[0]) ||
             eval_assn(ctx, m1, m2, a.kids[1]);
    case AssnKind::kNot: return !eval_assn(ctx, m1, m2, a.kids[0]);
    case AssnKind::kCompose:
      fail(Err::kInvalidParam,
           "compose assertions have no pairwise truth value", a.line, a.col);
  }
  return false;
}

// Substitutes a variable on one run throughout an assertion.
inline Assertion subst_assertion(const Assertion& a, int tag,
                                 const std::string& var, const Expr& e) {
  Assertion out = a;
  switch (a.kind) {
    case AssnKind::kTrue: return out;
    case AssnKind::kRel:
    case AssnKind::kAbsLe:
      if (tag == 1) out.left = subst_expr(a.left, var, e);
      if (tag == 2) out.right = subst_expr(a.right, var, e);
      if (a.kind == AssnKind::kAbsLe && tag == 1)
        out.bound_expr = subst_expr(a.bound_expr, var, e);
      return out;
    case AssnKind::kRel2:
      if (tag == 1) {
        out.l1 = subst_expr(a.l1, var, e);
        out.r1 = subst_expr(a.r1, var, e);
      } else {
        out.l2 = subst_expr(a.l2, var, e);
        out.r2 = subst_expr(a.r2, var, e);
      }
      return out;
    case AssnKind::kGuard:
      if (a.tag == tag) out.guard_expr = subst_expr(a.guard_expr, var, e);
      return out;
    default:
      for (auto& k : out.kids) k = subst_assertion(k, tag, var, e);
      return out;
  }
}

// Free variables of one run of an assertion.
inline void assn_fv(const Assertion& a, int tag, std::set<std::string>& out) {
  switch (a.kind) {
    case AssnKind::kTrue: return;
    case AssnKind::kRel:
    case AssnKind::kAbsLe:
      if (tag == 1) fv_expr(a.left, out);
      if (tag == 2) fv_expr(a.right, out);
      if (a.kind == AssnKind::kAbsLe && tag == 1) fv_expr(a.bound_expr, out);
      return;
    case AssnKind::kRel2:
      if (tag == 1) {
        fv_expr(a.l1, out);
        fv_expr(a.r1, out);
      } else {
        fv_expr(a.l2, out);
        fv_expr(a.r2, out);
      }
      return;
    case AssnKind::kGuard:
      if (a.tag == tag) fv_expr(a.guard_expr, out);
      return;
    default:
      for (const auto& k : a.kids) assn_fv(k, tag, out);
      return;
  }
}

// ---------------------------------------------------------------------------
// Assertion parser.

namespace detail {

class AssnParser {
 public:
  AssnParser(std::vector<Token> toks, const Context& ctx)
      : p_(std::move(toks)), ctx_(ctx) {}

  Assertion parse() {
    Assertion a = parse_or();
    if (!p_.at_end())
      fail(Err::kSyntaxError, "trailing input in assertion: '" +
                                  p_.cur().text + "'",
           p_.cur().line, p_.cur().col);
    return a;
  }

 private:
  Assertion parse_or() {
    Assertion a = parse_and();
    while (p_.peek_is("||")) {
      p_.accept("||");
      a = Assertion::a_or(std::move(a), parse_and());
    }
    return a;
  }
  Assertion parse_and() {
    Assertion a = parse_not();
    while (p_.peek_is("&&")) {
      p_.accept("&&");
      a = Assertion::a_and(std::move(a), parse_not());
    }
    return a;
  }
  Assertion parse_not() {
    if (p_.accept("!")) return Assertion::a_not(parse_not());
    return parse_atom();
  }

  int parse_tag() {
    p_.expect("@", "tagged expression");
    std::int64_t t = p_.expect_int("run tag");
    if (t != 1 && t != 2)
      fail(Err::kBadTag, "run tag must be 1 or 2", p_.cur().line,
           p_.cur().col);
    return static_cast<int>(t);
  }

  CmpOp parse_cmp_op() {
    if (p_.accept("==")) return CmpOp::kEq;
    if (p_.accept("!=")) return CmpOp::kNe;
    if (p_.accept("<=")) return CmpOp::kLe;
    if (p_.accept(">=")) return CmpOp::kGe;
    if (p_.accept("<")) return CmpOp::kLt;
    if (p_.accept(">")) return CmpOp::kGt;
    fail(Err::kSyntaxError, "expected comparison, found '" + p_.cur().text +
                                "'",
         p_.cur().line, p_.cur().col);
  }

  // term := expr '@' tag | constant-expr (tag-invariant)
  struct Term {
    Expr e;
    std::optional<int> tag;
  };
  Term parse_term() {
    Expr e = p_.parse_term_expr();
    Term t;
    if (p_.peek_is("@")) {
      t.tag = parse_tag();
    } else {
      std::set<std::string> fv;
      fv_expr(e, fv);
      if (!fv.empty())
        fail(Err::kBadTag,
             "expression with variables needs a run tag: " + print_expr(e),
             e.line, e.col);
    }
    t.e = std::move(e);
    return t;
  }

  // Orients (term cmp term) into left@1 cmp right@2.
  Assertion make_rel(Term l, CmpOp op, Term r, int line, int col) {
    int lt = l.tag.value_or(r.tag ? 3 - *r.tag : 1);
    int rt = r.tag.value_or(3 - lt);
    if (lt == rt)
      fail(Err::kBadTag,
           "relation must connect run 1 with run 2 (same tag on both sides)",
           line, col);
    Assertion a = lt == 1 ? Assertion::rel(std::move(l.e), op, std::move(r.e))
                          : Assertion::rel(std::move(r.e),
                                           [&] {
                                             switch (op) {
                                               case CmpOp::kLt:
                                                 return CmpOp::kGt;
                                               case CmpOp::kLe:
                                                 return CmpOp::kGe;
                                               case CmpOp::kGt:
                                                 return CmpOp::kLt;
                                               case CmpOp::kGe:
                                                 return CmpOp::kLe;
                                               default: return op;
                                             }
                                           }(),
                                           std::move(l.e));
    a.line = line;
    a.col = col;
    return a;
  }

  Assertion parse_atom() {
    int line = p_.cur().line, col = p_.cur().col;
    if (p_.accept("true")) return Assertion::truth();
    if (p_.peek_is("compose")) {
      p_.accept("compose");
      p_.expect("(", "compose");
      Assertion a = parse_or();
      p_.expect(";", "compose");
      Assertion b = parse_or();
      p_.expect(")", "compose");
      return Assertion::compose(std::move(a), std::move(b));
    }
    if (p_.peek_is("abs")) {
      p_.accept("abs");
      p_.expect("(", "abs");
      Expr e1 = p_.parse_term_expr();
      int t1 = parse_tag();
      p_.expect("-", "abs");
      Expr e2 = p_.parse_term_expr();
      int t2 = parse_tag();
      p_.expect(")", "abs");
      if (t1 != 1 || t2 != 2)
        fail(Err::kBadTag, "abs(...) expects run 1 minus run 2", line, col);
      p_.expect("<=", "abs bound");
      Expr r = p_.parse_term_expr();
      Assertion a =
          Assertion::abs_le(std::move(e1), std::move(e2), std::move(r));
      a.line = line;
      a.col = col;
      return a;
    }
    if (p_.peek_is("adj") || p_.peek_is("adjb")) {
      bool bounded = p_.peek_is("adjb");
      p_.accept(bounded ? "adjb" : "adj");
      p_.expect("(", "adjacency");
      std::string x1 = p_.expect_ident("vector variable");
      int t1 = parse_tag();
      p_.expect(",", "adjacency");
      std::string x2 = p_.expect_ident("vector variable");
      int t2 = parse_tag();
      Expr bound = Expr::of_int(0);
      if (bounded) {
        p_.expect(",", "adjacency bound");
        bound = p_.parse_term_expr();
      }
      p_.expect(")", "adjacency");
      if (t1 != 1 || t2 != 2 || x1 != x2)
        fail(Err::kBadTag, "adjacency relates one vector across runs 1 and 2",
             line, col);
      return expand_adjacency(x1, bound, bounded, line, col);
    }
    // Backtracking over the three parenthesized shapes.
    if (p_.peek_is("(")) {
      std::size_t mark = p_.save();
      // (expr@tag op expr@tag) cmp (expr@tag op expr@tag)
      try {
        return parse_rel2();
      } catch (const Error&) {
        p_.restore(mark);
      }
      // term cmp term, where term may start with a parenthesized expr.
      try {
        return parse_rel_or_guard();
      } catch (const Error&) {
        p_.restore(mark);
      }
      p_.expect("(", "assertion");
      Assertion a = parse_or();
      p_.expect(")", "assertion");
      return a;
    }
    return parse_rel_or_guard();
  }

  Assertion parse_rel2() {
    int line = p_.cur().line, col = p_.cur().col;
    auto side = [&](Expr& a1, BinOp& op, Expr& a2) {
      p_.expect("(", "two-run term");
      a1 = p_.parse_term_expr();
      int t1 = parse_tag();
      if (p_.accept("+")) {
        op = BinOp::kAdd;
      } else if (p_.accept("-")) {
        op = BinOp::kSub;
      } else {
        fail(Err::kSyntaxError, "expected '+' or '-' in two-run term",
             p_.cur().line, p_.cur().col);
      }
      a2 = p_.parse_term_expr();
      int t2 = parse_tag();
      p_.expect(")", "two-run term");
      if (t1 != 1 || t2 != 2)
        fail(Err::kBadTag, "two-run term combines run 1 with run 2", line,
             col);
    };
    Assertion a;
    a.kind = AssnKind::kRel2;
    side(a.l1, a.lop, a.l2);
    a.cmp = parse_cmp_op();
    side(a.r1, a.rop, a.r2);
    a.line = line;
    a.col = col;
    return a;
  }

  Assertion parse_rel_or_guard() {
    int line = p_.cur().line, col = p_.cur().col;
    Term l = parse_term();
    static const char* kCmps[] = {"==", "!=", "<=", ">=", "<", ">"};
    bool has_cmp = false;
    for (const char* c : kCmps) has_cmp = has_cmp || p_.peek_is(c);
    if (!has_cmp) {
      if (!l.tag)
        fail(Err::kBadTag, "standalone assertion term needs a run tag", line,
             col);
      Assertion a = Assertion::guard(std::move(l.e), *l.tag);
      a.line = line;
      a.col = col;
      return a;
    }
    CmpOp op = parse_cmp_op();
    Term r = parse_term();
    return make_rel(std::move(l), op, std::move(r), line, col);
  }

  // adj(x@1, x@2 [, r]): the two runs' copies of x differ in at most one
  // slot (by at most r in the bounded form). Expanded to the explicit
  // disjunction over the differing slot so case analysis can split on it.
  Assertion expand_adjacency(const std::string& x, const Expr& bound,
                             bool bounded, int line, int col) {
    const Ty* t = ctx_.find(x);
    if (!t)
      fail(Err::kUnboundVariable, "unbound variable: " + x, line, col);
    if (!t->is_vector())
      fail(Err::kShapeError, "adjacency needs a vector variable", line, col);
    std::optional<Assertion> disj;
    for (std::int64_t i = 0; i < t->dim; ++i) {
      std::optional<Assertion> conj;
      for (std::int64_t j = 0; j < t->dim; ++j) {
        if (j == i) continue;
        Assertion eq = Assertion::rel(
            Expr::index(Expr::of_var(x), Expr::of_int(j)), CmpOp::kEq,
            Expr::index(Expr::of_var(x), Expr::of_int(j)));
        conj = conj ? Assertion::a_and(std::move(*conj), std::move(eq)) : eq;
      }
      if (bounded) {
        Assertion ab = Assertion::abs_le(
            Expr::index(Expr::of_var(x), Expr::of_int(i)),
            Expr::index(Expr::of_var(x), Expr::of_int(i)), bound);
        conj = conj ? Assertion::a_and(std::move(*conj), std::move(ab)) : ab;
      }
      Assertion c = conj ? std::move(*conj) : Assertion::truth();
      disj = disj ? Assertion::a_or(std::move(*disj), std::move(c))
                  : std::move(c);
    }
    if (!disj) return Assertion::truth();
    disj->line = line;
    disj->col = col;
    return *disj;
  }

  Parser p_;
  const Context& ctx_;
};

}  // namespace detail

inline Assertion parse_assertion(const std::string& src, const Context& ctx) {
  detail::AssnParser ap(tokenize(src), ctx);
  Assertion a = ap.parse();
  typecheck_assertion(ctx, a);
  return a;
}

}  // namespace spanlift
