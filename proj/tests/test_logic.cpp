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

#include "spanlift/logic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spanlift/dist.hpp"
#include "spanlift/error.hpp"
#include "spanlift/interp.hpp"
#include "spanlift/lang.hpp"

namespace spanlift {
namespace {

template <typename F>
Err code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Err::kIoError;
}

Program parse_checked(const std::string& src) {
  Program p = parse_program(src);
  typecheck_program(p);
  return p;
}

Assertion assn(const std::string& src, const Context& ctx) {
  return parse_assertion(src, ctx);
}

Judgment judge(const Program& p, const std::string& pre,
               const std::string& post, Flavor f) {
  return Judgment{p.ctx, p.body, p.body, assn(pre, p.ctx), assn(post, p.ctx),
                  f};
}

GridSpec grid(double center, double halfwidth, std::int64_t bins) {
  GridSpec g;
  g.center = round_to_quantum(center, Rat(1, 1000000));
  g.halfwidth = round_to_quantum(halfwidth, Rat(1, 1000000));
  g.bins = bins;
  return g;
}

// ---------------------------------------------------------------------------
// Grading monoids.

TEST(FlavorTest, GradeUnitsAndCombinesFollowTheMonoid) {
  Flavor d = grade_combine(Flavor::dp(0.3, 0.01), Flavor::dp(0.2, 0.02));
  EXPECT_DOUBLE_EQ(d.eps, 0.5);
  EXPECT_DOUBLE_EQ(d.delta, 0.03);

  Flavor r = grade_combine(Flavor::rdp(2.0, ExtReal(0.1)),
                           Flavor::rdp(2.0, ExtReal(0.25)));
  EXPECT_DOUBLE_EQ(r.alpha, 2.0);
  EXPECT_DOUBLE_EQ(r.rho.value(), 0.35);

  Flavor z = grade_combine(Flavor::zcdp(0.1, ExtReal(0.2)),
                           Flavor::zcdp(0.0, ExtReal(0.3)));
  EXPECT_DOUBLE_EQ(z.xi, 0.1);
  EXPECT_DOUBLE_EQ(z.rho.value(), 0.5);

  Flavor t = grade_combine(Flavor::tcdp(4.0, ExtReal(0.2)),
                           Flavor::tcdp(4.0, ExtReal(0.05)));
  EXPECT_DOUBLE_EQ(t.omega, 4.0);
  EXPECT_DOUBLE_EQ(t.rho.value(), 0.25);

  Flavor u = grade_unit(Flavor::rdp(3.0, ExtReal(1.0)));
  EXPECT_DOUBLE_EQ(u.alpha, 3.0);
  EXPECT_DOUBLE_EQ(u.rho.value(), 0.0);
  EXPECT_TRUE(flavor_close(grade_combine(r, grade_unit(r)), r));

  EXPECT_EQ(code_of([] {
              grade_combine(Flavor::dp(0.1, 0), Flavor::zcdp(0, ExtReal(0.1)));
            }),
            Err::kFlavorMismatch);
  EXPECT_EQ(code_of([] {
              grade_combine(Flavor::rdp(2.0, ExtReal(0.1)),
                            Flavor::rdp(3.0, ExtReal(0.1)));
            }),
            Err::kBadGradeArithmetic);
}

TEST(FlavorTest, GradeOrderIsComponentwiseWithFixedIndices) {
  EXPECT_TRUE(grade_leq(Flavor::dp(0.1, 0.01), Flavor::dp(0.2, 0.01)));
  EXPECT_FALSE(grade_leq(Flavor::dp(0.2, 0.01), Flavor::dp(0.1, 0.02)));
  EXPECT_TRUE(grade_leq(Flavor::rdp(2.0, ExtReal(0.1)),
                        Flavor::rdp(2.0, ExtReal(0.1))));
  EXPECT_FALSE(grade_leq(Flavor::rdp(2.0, ExtReal(0.1)),
                         Flavor::rdp(2.5, ExtReal(0.2))));
  EXPECT_TRUE(grade_leq(Flavor::zcdp(0, ExtReal(0.1)),
                        Flavor::zcdp(0, ExtReal::pos_inf())));
  EXPECT_FALSE(grade_leq(Flavor::dp(0.1, 0), Flavor::zcdp(0, ExtReal(0.1))));
}

TEST(FlavorTest, ValidationRejectsBadParameters) {
  EXPECT_EQ(code_of([] { Flavor::dp(-0.1, 0).validate(); }),
            Err::kInvalidParam);
  EXPECT_EQ(code_of([] { Flavor::rdp(1.0, ExtReal(0.1)).validate(); }),
            Err::kInvalidParam);
  EXPECT_EQ(code_of([] { Flavor::zcdp(-1, ExtReal(0.1)).validate(); }),
            Err::kInvalidParam);
  EXPECT_EQ(code_of([] { Flavor::tcdp(1.0, ExtReal(0.1)).validate(); }),
            Err::kInvalidParam);
  EXPECT_NO_THROW(Flavor::rdp(2.0, ExtReal::pos_inf()).validate());
}

// ---------------------------------------------------------------------------
// Mechanism axioms.

class MechanismRuleTest : public ::testing::Test {
 protected:
  Program lap_ = parse_checked(
      "vars { x : real; y : real; } y <-$ lap(x, 2.0);");
  Program gauss_ = parse_checked(
      "vars { x : real; y : real; } y <-$ gauss(x, 4.0);");
  Program bern_ = parse_checked(
      "vars { p : real; c : bool; } c <-$ bern(p);");

  Judgment apply0(const std::string& rule, const Judgment& shape) {
    return apply_rule(rule, {}, SideParams{}, shape);
  }
};

TEST_F(MechanismRuleTest, LaplaceRulesScaleSensitivityByTheNoise) {
  Judgment shape = judge(lap_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                         Flavor::dp(0.5, 0));
  Judgment got = apply0("dp-lap", shape);
  EXPECT_DOUBLE_EQ(got.flavor.eps, 0.5);
  EXPECT_DOUBLE_EQ(got.flavor.delta, 0.0);

  shape.flavor = Flavor::zcdp(0.5, ExtReal(0.0));
  got = apply0("zcdp-lap", shape);
  EXPECT_DOUBLE_EQ(got.flavor.xi, 0.5);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.0);
}

TEST_F(MechanismRuleTest, LaplaceRenyiRuleMatchesItsClosedForm) {
  Judgment shape = judge(lap_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                         Flavor::rdp(2.0, ExtReal(0.0)));
  Judgment got = apply0("rdp-lap", shape);
  // Order two, scale two, written out by hand.
  double expected =
      std::log(2.0 / 3.0 * std::exp(0.5) + 1.0 / 3.0 * std::exp(-1.0));
  EXPECT_NEAR(got.flavor.rho.value(), expected, 1e-12);

  // The rule is stated for unit sensitivity only.
  Judgment wide = judge(lap_, "abs(x@1 - x@2) <= 2.0", "y@1 == y@2",
                        Flavor::rdp(2.0, ExtReal(0.0)));
  EXPECT_EQ(code_of([&] { apply0("rdp-lap", wide); }),
            Err::kSideConditionFailed);
}

TEST_F(MechanismRuleTest, BernoulliFlipRulesUseTheLogOddsRatio) {
  std::string pre = "p@1 == 0.75 && (1.0 - p)@1 == p@2";
  Judgment shape = judge(bern_, pre, "c@1 == c@2", Flavor::dp(0, 0));
  Judgment got = apply0("dp-bern", shape);
  EXPECT_NEAR(got.flavor.eps, std::log(3.0), 1e-12);
  EXPECT_DOUBLE_EQ(got.flavor.delta, 0.0);

  shape.flavor = Flavor::zcdp(0, ExtReal(0.0));
  got = apply0("zcdp-bern", shape);
  EXPECT_NEAR(got.flavor.xi, std::log(3.0), 1e-12);

  shape.flavor = Flavor::rdp(2.0, ExtReal(0.0));
  got = apply0("rdp-bern", shape);
  EXPECT_NEAR(got.flavor.rho.value(), std::log(7.0 / 3.0), 1e-12);

  // A parameter on the boundary has an infinite odds ratio.
  Judgment degenerate = judge(bern_, "p@1 == 1.0 && (1.0 - p)@1 == p@2",
                              "c@1 == c@2", Flavor::dp(0, 0));
  EXPECT_EQ(code_of([&] { apply0("dp-bern", degenerate); }),
            Err::kSideConditionFailed);
}

TEST_F(MechanismRuleTest, EqualParameterVariantsCostNothing) {
  Judgment shape = judge(bern_, "p@1 == p@2", "c@1 == c@2",
                         Flavor::rdp(2.0, ExtReal(0.0)));
  Judgment got = apply0("rdp-bern-eq", shape);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.0);

  shape.flavor = Flavor::zcdp(0, ExtReal(0.0));
  EXPECT_EQ(code_of([&] { apply0("rdp-bern-eq", shape); }),
            Err::kFlavorMismatch);

  Judgment g = judge(gauss_, "x@1 == x@2", "y@1 == y@2",
                     Flavor::tcdp(3.0, ExtReal(0.0)));
  got = apply0("tcdp-gauss-eq", g);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.0);
  EXPECT_DOUBLE_EQ(got.flavor.omega, 3.0);
}

TEST_F(MechanismRuleTest, GaussianRulesScaleWithSensitivitySquared) {
  Judgment shape = judge(gauss_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                         Flavor::zcdp(0, ExtReal(0.0)));
  Judgment got = apply0("zcdp-gauss", shape);
  EXPECT_DOUBLE_EQ(got.flavor.xi, 0.0);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.125);

  shape.flavor = Flavor::rdp(3.0, ExtReal(0.0));
  got = apply0("rdp-gauss", shape);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.375);

  shape.flavor = Flavor::tcdp(3.0, ExtReal(0.0));
  got = apply0("tcdp-gauss", shape);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.125);
  EXPECT_DOUBLE_EQ(got.flavor.omega, 3.0);
}

TEST_F(MechanismRuleTest, GaussianDpRuleEnforcesItsNoiseFloor) {
  Program big = parse_checked(
      "vars { x : real; y : real; } y <-$ gauss(x, 25.0);");
  Judgment ok = judge(big, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                      Flavor::dp(1.0, 1e-5));
  Judgment got = apply0("dp-gauss", ok);
  EXPECT_DOUBLE_EQ(got.flavor.eps, 1.0);
  EXPECT_DOUBLE_EQ(got.flavor.delta, 1e-5);

  Judgment small = judge(gauss_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                         Flavor::dp(1.0, 1e-5));
  EXPECT_EQ(code_of([&] { apply0("dp-gauss", small); }),
            Err::kSideConditionFailed);
}

TEST_F(MechanismRuleTest, SinhGaussianRuleChecksItsRange) {
  Program p = parse_checked(
      "vars { x : real; y : real; } y <-$ sinh_gauss(x, 2.0, 0.02);");
  Judgment shape = judge(p, "abs(x@1 - x@2) <= 0.1", "y@1 == y@2",
                         Flavor::tcdp(2.5, ExtReal(0.0)));
  Judgment got = apply0("tcdp-sinh-gauss", shape);
  EXPECT_NEAR(got.flavor.omega, 2.5, 1e-12);
  EXPECT_NEAR(got.flavor.rho.value(), 4.0, 1e-12);

  Program narrow = parse_checked(
      "vars { x : real; y : real; } y <-$ sinh_gauss(x, 0.15, 0.02);");
  Judgment bad = judge(narrow, "abs(x@1 - x@2) <= 0.1", "y@1 == y@2",
                       Flavor::tcdp(2.5, ExtReal(0.0)));
  EXPECT_EQ(code_of([&] { apply0("tcdp-sinh-gauss", bad); }),
            Err::kSideConditionFailed);
}

TEST_F(MechanismRuleTest, MechanismFramesCarryUntouchedFacts) {
  Program p = parse_checked(
      "vars { x : real; y : real; z : real; } y <-$ gauss(x, 4.0);");
  Judgment shape = judge(p, "abs(x@1 - x@2) <= 1.0 && z@1 == z@2",
                         "y@1 == y@2 && z@1 == z@2",
                         Flavor::zcdp(0, ExtReal(0.0)));
  Judgment got = apply0("zcdp-gauss", shape);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.125);
  EXPECT_TRUE(assn_equal(got.post, shape.post));

  // The sampled variable may not appear in the carried fact.
  Judgment clash = judge(p, "abs(x@1 - x@2) <= 1.0 && y@1 == z@2",
                         "y@1 == y@2 && y@1 == z@2",
                         Flavor::zcdp(0, ExtReal(0.0)));
  EXPECT_EQ(code_of([&] { apply0("zcdp-gauss", clash); }),
            Err::kSideConditionFailed);
}

TEST_F(MechanismRuleTest, MechanismShapeErrorsAreRejected) {
  Judgment eq_pre = judge(lap_, "x@1 == x@2", "y@1 == y@2",
                          Flavor::dp(0.5, 0));
  EXPECT_EQ(code_of([&] { apply0("dp-lap", eq_pre); }), Err::kShapeMismatch);

  Judgment wrong_sampler = judge(gauss_, "abs(x@1 - x@2) <= 1.0",
                                 "y@1 == y@2", Flavor::dp(0.5, 0));
  EXPECT_EQ(code_of([&] { apply0("dp-lap", wrong_sampler); }),
            Err::kShapeMismatch);

  Judgment open_bound = judge(lap_, "abs(x@1 - x@2) <= y", "y@1 == y@2",
                              Flavor::dp(0.5, 0));
  EXPECT_EQ(code_of([&] { apply0("dp-lap", open_bound); }),
            Err::kSideConditionFailed);

  Judgment not_samples = judge(
      parse_checked("vars { x : real; y : real; } y <- x;"),
      "abs(x@1 - x@2) <= 1.0", "y@1 == y@2", Flavor::dp(0.5, 0));
  EXPECT_EQ(code_of([&] { apply0("dp-lap", not_samples); }),
            Err::kShapeMismatch);
}

// ---------------------------------------------------------------------------
// Structural rules.

class StructuralRuleTest : public ::testing::Test {
 protected:
  Program assign_ = parse_checked("vars { x : real; } x <- x + 1.0;");
  Program skip_ = parse_checked("vars { x : real; } skip;");
};

TEST_F(StructuralRuleTest, SkipAndAssignmentAxiomsComputeTheirPreconditions) {
  Judgment s = judge(skip_, "x@1 == x@2", "x@1 == x@2", Flavor::dp(0, 0));
  Judgment got = apply_rule("skip", {}, SideParams{}, s);
  EXPECT_TRUE(assn_equal(got.post, s.pre));
  EXPECT_DOUBLE_EQ(got.flavor.eps, 0.0);

  Judgment a = judge(assign_, "true", "x@1 == x@2", Flavor::dp(0, 0));
  got = apply_rule("assn", {}, SideParams{}, a);
  EXPECT_TRUE(assn_equal(got.pre,
                         assn("(x + 1.0)@1 == (x + 1.0)@2", assign_.ctx)));
}

TEST_F(StructuralRuleTest, SequencingAddsGradesAndChainsThroughTheMidpoint) {
  Assertion a = assn("x@1 == x@2", assign_.ctx);
  Assertion b = assn("(x + 1.0)@1 == (x + 1.0)@2", assign_.ctx);
  Assertion c = assn("x@1 <= x@2", assign_.ctx);
  Judgment j1{assign_.ctx, assign_.body, assign_.body, a, b,
              Flavor::dp(0.1, 0.001)};
  Judgment j2{assign_.ctx, skip_.body, skip_.body, b, c,
              Flavor::dp(0.2, 0.002)};
  Judgment shape{assign_.ctx, Cmd::seq(assign_.body, skip_.body),
                 Cmd::seq(assign_.body, skip_.body), a, c,
                 Flavor::dp(0.3, 0.003)};
  Judgment got = apply_rule("seq", {j1, j2}, SideParams{}, shape);
  EXPECT_NEAR(got.flavor.eps, 0.3, 1e-15);
  EXPECT_NEAR(got.flavor.delta, 0.003, 1e-15);
  EXPECT_TRUE(assn_equal(got.pre, a));
  EXPECT_TRUE(assn_equal(got.post, c));

  Judgment j2bad = j2;
  j2bad.pre = c;
  EXPECT_EQ(code_of([&] { apply_rule("seq", {j1, j2bad}, SideParams{},
                                     shape); }),
            Err::kShapeMismatch);
}

TEST_F(StructuralRuleTest, WeakeningOnlyLoosens) {
  Assertion a = assn("x@1 == x@2", assign_.ctx);
  Judgment p{assign_.ctx, skip_.body, skip_.body, a, a,
             Flavor::dp(0.1, 0.001)};
  Judgment shape = p;
  shape.flavor = Flavor::dp(0.2, 0.01);
  Judgment got = apply_rule("weak", {p}, SideParams{}, shape);
  EXPECT_DOUBLE_EQ(got.flavor.eps, 0.2);

  shape.flavor = Flavor::dp(0.05, 0.01);
  EXPECT_EQ(code_of([&] { apply_rule("weak", {p}, SideParams{}, shape); }),
            Err::kSideConditionFailed);
}

TEST_F(StructuralRuleTest, CaseCombinesDisjointPreconditions) {
  Assertion a = assn("x@1 == x@2", assign_.ctx);
  Assertion b = assn("x@1 <= x@2", assign_.ctx);
  Assertion post = assn("x@1 == x@2", assign_.ctx);
  Judgment j1{assign_.ctx, assign_.body, assign_.body, a, post,
              Flavor::zcdp(0, ExtReal(0.5))};
  Judgment j2{assign_.ctx, assign_.body, assign_.body, b, post,
              Flavor::zcdp(0, ExtReal(0.5))};
  Judgment shape = j1;
  shape.pre = Assertion::a_or(a, b);
  Judgment got = apply_rule("case", {j1, j2}, SideParams{}, shape);
  EXPECT_EQ(got.pre.kind, AssnKind::kOr);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.5);

  Judgment j2hot = j2;
  j2hot.flavor = Flavor::zcdp(0, ExtReal(0.6));
  EXPECT_EQ(code_of([&] { apply_rule("case", {j1, j2hot}, SideParams{},
                                     shape); }),
            Err::kBadGradeArithmetic);
}

TEST_F(StructuralRuleTest, ConditionalRuleAlignsBranchesAndGuards) {
  Program p = parse_checked(
      "vars { b : bool; x : real; } if b { x <- 1.0; } else { x <- 2.0; }");
  Assertion phi = assn("b@1 == b@2", p.ctx);
  Assertion post = assn("x@1 == x@2", p.ctx);
  Assertion guard1 = Assertion::guard(*p.body.guard, 1);
  Judgment t{p.ctx, p.body.kids[0], p.body.kids[0],
             Assertion::a_and(phi, guard1), post, Flavor::dp(0.1, 0)};
  Judgment e{p.ctx, p.body.kids[1], p.body.kids[1],
             Assertion::a_and(phi, Assertion::a_not(guard1)), post,
             Flavor::dp(0.1, 0)};
  Judgment shape{p.ctx, p.body, p.body, phi, post, Flavor::dp(0.1, 0)};
  Judgment got = apply_rule("cond", {t, e}, SideParams{}, shape);
  EXPECT_TRUE(assn_equal(got.pre, phi));
  EXPECT_TRUE(assn_equal(got.post, post));
  EXPECT_DOUBLE_EQ(got.flavor.eps, 0.1);

  Judgment ehot = e;
  ehot.flavor = Flavor::dp(0.2, 0);
  EXPECT_EQ(code_of([&] { apply_rule("cond", {t, ehot}, SideParams{},
                                     shape); }),
            Err::kBadGradeArithmetic);
}

// ---------------------------------------------------------------------------
// Pointwise transitivity.

class TransRuleTest : public ::testing::Test {
 protected:
  Program p_ = parse_checked(
      "vars { x : real; y : real; } y <-$ lap(x, 2.0);");

  Judgment prem(Flavor f) {
    return judge(p_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2", f);
  }
  Judgment shape_for(Flavor f) {
    Judgment s = prem(f);
    s.pre = Assertion::compose(assn("abs(x@1 - x@2) <= 1.0", p_.ctx),
                               assn("abs(x@1 - x@2) <= 1.0", p_.ctx));
    return s;
  }
};

TEST_F(TransRuleTest, PointwiseCompositionAddsDpBudgetsTheTightWay) {
  Judgment a = prem(Flavor::dp(0.3, 0.01));
  Judgment b = prem(Flavor::dp(0.4, 0.02));
  Judgment got = apply_rule("dp-trans", {a, b}, SideParams{},
                            shape_for(Flavor::dp(0.7, 0)));
  EXPECT_NEAR(got.flavor.eps, 0.7, 1e-15);
  double want = std::max(std::exp(0.4) * 0.01 + 0.02,
                         std::exp(0.3) * 0.02 + 0.01);
  EXPECT_NEAR(got.flavor.delta, want, 1e-15);
  EXPECT_EQ(got.pre.kind, AssnKind::kCompose);
}

TEST_F(TransRuleTest, HoelderSplitRelatesTheRenyiOrders) {
  SideParams side;
  side.nums["p"] = 2;
  side.nums["q"] = 2;
  Judgment a = prem(Flavor::rdp(6.0, ExtReal(0.1)));
  Judgment b = prem(Flavor::rdp(5.0, ExtReal(0.2)));
  Judgment got = apply_rule("rdp-trans", {a, b}, side,
                            shape_for(Flavor::rdp(3.0, ExtReal(0.0))));
  EXPECT_NEAR(got.flavor.rho.value(), 5.0 / 4.0 * 0.1 + 0.2, 1e-12);

  Judgment askew = prem(Flavor::rdp(4.0, ExtReal(0.1)));
  EXPECT_EQ(code_of([&] {
              apply_rule("rdp-trans", {askew, b}, side,
                         shape_for(Flavor::rdp(3.0, ExtReal(0.0))));
            }),
            Err::kSideConditionFailed);
}

TEST_F(TransRuleTest, GroupCompositionScalesItsCoefficients) {
  SideParams side;
  side.nums["k"] = 3;
  // One-step grade (xi, rho); the (k-1)-group premise must already carry
  // the documented scaling before the rule will extend it to k.
  Judgment b = prem(Flavor::zcdp(0.1, ExtReal(0.05)));
  Judgment a = prem(Flavor::zcdp(0.1 * zcdp_group_scale(2),
                                 ExtReal(8 * 0.05)));
  Judgment got = apply_rule("zcdp-trans", {a, b}, side,
                            shape_for(Flavor::zcdp(0, ExtReal(0.0))));
  EXPECT_NEAR(got.flavor.xi, 0.1 * 6.0, 1e-12);
  EXPECT_NEAR(got.flavor.rho.value(), 9 * 0.05, 1e-12);

  // An explicit side parameter pins an alternative coefficient scheme.
  SideParams pinned = side;
  pinned.nums["xi_scale_prev"] = 2.0;
  pinned.nums["xi_scale"] = 4.0;
  Judgment a2 = prem(Flavor::zcdp(0.1 * 2.0, ExtReal(8 * 0.05)));
  got = apply_rule("zcdp-trans", {a2, b}, pinned,
                   shape_for(Flavor::zcdp(0, ExtReal(0.0))));
  EXPECT_NEAR(got.flavor.xi, 0.4, 1e-12);

  Judgment amiss = prem(Flavor::zcdp(0.2, ExtReal(8 * 0.05)));
  EXPECT_EQ(code_of([&] {
              apply_rule("zcdp-trans", {amiss, b}, side,
                         shape_for(Flavor::zcdp(0, ExtReal(0.0))));
            }),
            Err::kBadGradeArithmetic);
}

// ---------------------------------------------------------------------------
// Conversions between flavors.

class ConversionRuleTest : public ::testing::Test {
 protected:
  Program p_ = parse_checked(
      "vars { x : real; y : real; } y <-$ lap(x, 2.0);");

  Judgment prem(Flavor f) {
    return judge(p_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2", f);
  }
  Judgment conv(const std::string& rule, Flavor from, Flavor to) {
    return apply_rule(rule, {prem(from)}, SideParams{}, prem(to));
  }
};

TEST_F(ConversionRuleTest, PureDpAndPureZcdpInterchange) {
  Judgment got = conv("conv-dp-zcdp", Flavor::dp(0.7, 0),
                      Flavor::zcdp(0.7, ExtReal(0.0)));
  EXPECT_EQ(got.flavor.kind, FlavorKind::kZCDP);
  EXPECT_DOUBLE_EQ(got.flavor.xi, 0.7);

  got = conv("conv-dp-zcdp", Flavor::zcdp(0.7, ExtReal(0.0)),
             Flavor::dp(0.7, 0));
  EXPECT_EQ(got.flavor.kind, FlavorKind::kDP);
  EXPECT_DOUBLE_EQ(got.flavor.eps, 0.7);

  EXPECT_EQ(code_of([&] {
              conv("conv-dp-zcdp", Flavor::dp(0.7, 1e-9),
                   Flavor::zcdp(0.7, ExtReal(0.0)));
            }),
            Err::kSideConditionFailed);
  EXPECT_EQ(code_of([&] {
              conv("conv-dp-zcdp", Flavor::rdp(2.0, ExtReal(0.1)),
                   Flavor::zcdp(0.1, ExtReal(0.0)));
            }),
            Err::kUnsupportedDirection);
}

TEST_F(ConversionRuleTest, ConcentratedBoundsConvertToDpAtAnyDelta) {
  double log1d = std::log(1e5);
  Judgment got = conv("conv-zcdp-dp", Flavor::zcdp(0.1, ExtReal(0.125)),
                      Flavor::dp(0, 1e-5));
  EXPECT_NEAR(got.flavor.eps,
              0.1 + 0.125 + 2 * std::sqrt(0.125 * log1d), 1e-12);
  EXPECT_DOUBLE_EQ(got.flavor.delta, 1e-5);

  got = conv("conv-rdp-dp", Flavor::rdp(5.0, ExtReal(0.2)),
             Flavor::dp(0, 1e-6));
  EXPECT_NEAR(got.flavor.eps, 0.2 + std::log(1e6) / 4.0, 1e-12);

  // A tight order cap keeps the conversion at the profile's edge.
  got = conv("conv-tcdp-dp", Flavor::tcdp(2.0, ExtReal(0.5)),
             Flavor::dp(0, 1e-5));
  EXPECT_NEAR(got.flavor.eps, 0.5 * 2 + log1d / (2 - 1), 1e-12);

  // A loose cap lets the optimal order through.
  double beta = 1 + std::sqrt(log1d / 0.5);
  got = conv("conv-tcdp-dp", Flavor::tcdp(10.0, ExtReal(0.5)),
             Flavor::dp(0, 1e-5));
  EXPECT_NEAR(got.flavor.eps, 0.5 * beta + log1d / (beta - 1), 1e-12);

  got = conv("conv-zcdp-rdp", Flavor::zcdp(0, ExtReal(0.3)),
             Flavor::rdp(4.0, ExtReal(0.0)));
  EXPECT_EQ(got.flavor.kind, FlavorKind::kRDP);
  EXPECT_DOUBLE_EQ(got.flavor.alpha, 4.0);
  EXPECT_DOUBLE_EQ(got.flavor.rho.value(), 0.3);

  EXPECT_EQ(code_of([&] {
              conv("conv-zcdp-rdp", Flavor::zcdp(0.1, ExtReal(0.3)),
                   Flavor::rdp(4.0, ExtReal(0.0)));
            }),
            Err::kSideConditionFailed);
  EXPECT_EQ(code_of([&] {
              conv("conv-zcdp-dp", Flavor::zcdp(0, ExtReal(0.125)),
                   Flavor::dp(0, 0));
            }),
            Err::kSideConditionFailed);
}

// ---------------------------------------------------------------------------
// Whole-tree checking.

class CheckDerivationTest : public ::testing::Test {
 protected:
  Program lap_ = parse_checked(
      "vars { x : real; y : real; } y <-$ lap(x, 2.0);");

  Derivation lap_leaf(Flavor f) {
    Derivation d;
    d.rule = "dp-lap";
    d.conclusion = judge(lap_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2", f);
    return d;
  }
  Derivation weak_root(Derivation leaf, Flavor f) {
    Derivation d;
    d.rule = "weak";
    d.conclusion = leaf.conclusion;
    d.conclusion.flavor = f;
    d.premises = {std::move(leaf)};
    return d;
  }
};

TEST_F(CheckDerivationTest, ALaplaceProofTreeIsAcceptedEndToEnd) {
  Derivation root = weak_root(lap_leaf(Flavor::dp(0.5, 0)),
                              Flavor::dp(0.6, 0.01));
  CheckOptions strict;
  strict.strict = true;
  Certificate cert = check_derivation(root, strict);
  EXPECT_TRUE(cert.accepted) << cert.reject_detail;
  EXPECT_TRUE(cert.assumptions.empty());
  EXPECT_TRUE(cert.extensions.empty());
  EXPECT_TRUE(flavor_close(cert.final_budget, Flavor::dp(0.6, 0.01)));
}

TEST_F(CheckDerivationTest, GradeTamperingIsRejectedAtItsPath) {
  Derivation root = weak_root(lap_leaf(Flavor::dp(0.5, 0)),
                              Flavor::dp(0.6, 0.01));
  root.premises[0].conclusion.flavor = Flavor::dp(0.4, 0);
  Certificate cert = check_derivation(root);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_path, "root.premises[0]");
  EXPECT_EQ(cert.reject_code, Err::kBadGradeArithmetic);

  root = weak_root(lap_leaf(Flavor::dp(0.5, 0)), Flavor::dp(0.4, 0));
  cert = check_derivation(root);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_path, "root");
  EXPECT_EQ(cert.reject_code, Err::kSideConditionFailed);
}

TEST_F(CheckDerivationTest, ABoundedLoopProofChecksWithRealEntailments) {
  Program p = parse_checked(
      "vars { i : int; } while i < 2 bound 2 { i <- i + 1; }");
  const Cmd& loop = p.body;
  const Cmd& body = loop.kids[0];
  Assertion theta = assn("i@1 == i@2", p.ctx);
  Expr vi = Expr::of_var("i");

  auto premise = [&](std::int64_t k) {
    Assertion post = Assertion::a_and(
        theta, Assertion::rel(vi, CmpOp::kGt, Expr::of_int(k)));
    Assertion axiom_pre = subst_assertion(
        subst_assertion(post, 1, "i", *body.rhs), 2, "i", *body.rhs);
    Derivation axiom;
    axiom.rule = "assn";
    axiom.conclusion = Judgment{p.ctx, body, body, axiom_pre, post,
                                Flavor::dp(0, 0)};
    Derivation w;
    w.rule = "weak";
    w.conclusion = Judgment{
        p.ctx, body, body,
        Assertion::a_and(
            Assertion::a_and(theta,
                             Assertion::rel(vi, CmpOp::kEq, Expr::of_int(k))),
            Assertion::rel(vi, CmpOp::kLe, Expr::of_int(2))),
        post, Flavor::dp(0, 0)};
    w.premises = {std::move(axiom)};
    return w;
  };

  Derivation root;
  root.rule = "while";
  root.side.nums["n"] = 2;
  root.side.variant = vi;
  root.side.invariant = theta;
  root.premises = {premise(0), premise(1)};
  Assertion guard1 = Assertion::guard(*loop.guard, 1);
  root.conclusion = Judgment{
      p.ctx, loop, loop,
      Assertion::a_and(Assertion::a_and(theta, guard1),
                       Assertion::rel(vi, CmpOp::kGe, Expr::of_int(0))),
      Assertion::a_and(theta, Assertion::a_not(guard1)), Flavor::dp(0, 0)};

  CheckOptions strict;
  strict.strict = true;
  Certificate cert = check_derivation(root, strict);
  EXPECT_TRUE(cert.accepted)
      << cert.reject_path << ": " << cert.reject_detail;
  EXPECT_TRUE(cert.assumptions.empty());

  // The annotated bound must agree with the premise count.
  Derivation wrong = root;
  wrong.conclusion.left.bound = 3;
  wrong.conclusion.right.bound = 3;
  cert = check_derivation(wrong);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_code, Err::kSideConditionFailed);
}

TEST_F(CheckDerivationTest, StrictModeRefusesAssumptionLeaves) {
  Derivation leaf;
  leaf.rule = "assume";
  leaf.conclusion = judge(lap_, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                          Flavor::dp(0.01, 0));
  leaf.side.label = "trusted-noise-bound";
  Certificate cert = check_derivation(leaf);
  EXPECT_TRUE(cert.accepted);
  ASSERT_EQ(cert.assumptions.size(), 1u);
  EXPECT_NE(cert.assumptions[0].find("trusted-noise-bound"),
            std::string::npos);

  CheckOptions strict;
  strict.strict = true;
  cert = check_derivation(leaf, strict);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_code, Err::kEntailmentUnknownStrict);

  leaf.side.label.clear();
  cert = check_derivation(leaf);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_code, Err::kBadProof);
}

TEST_F(CheckDerivationTest, ConversionsRecordTheirLosslessCaveat) {
  Program p = parse_checked(
      "vars { x : real; y : real; } y <-$ gauss(x, 4.0);");
  Derivation leaf;
  leaf.rule = "zcdp-gauss";
  leaf.conclusion = judge(p, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                          Flavor::zcdp(0, ExtReal(0.125)));
  Derivation root;
  root.rule = "conv-zcdp-dp";
  double eps = 0.125 + 2 * std::sqrt(0.125 * std::log(1e5));
  root.conclusion = judge(p, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                          Flavor::dp(eps, 1e-5));
  root.premises = {leaf};
  Certificate cert = check_derivation(root);
  EXPECT_TRUE(cert.accepted) << cert.reject_detail;
  ASSERT_EQ(cert.assumptions.size(), 1u);
  EXPECT_NE(cert.assumptions[0].find("lossless"), std::string::npos);
}

TEST_F(CheckDerivationTest, UnknownRulesAndBadShapesAreRejected) {
  Derivation d = lap_leaf(Flavor::dp(0.5, 0));
  d.rule = "made-up";
  Certificate cert = check_derivation(d);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_code, Err::kUnsupportedRule);

  d = lap_leaf(Flavor::dp(0.5, 0));
  d.conclusion.post = assn("y@1 <= y@2", lap_.ctx);
  cert = check_derivation(d);
  EXPECT_FALSE(cert.accepted);
  EXPECT_EQ(cert.reject_code, Err::kShapeMismatch);
}

// ---------------------------------------------------------------------------
// Witness pairs.

TEST(WitnessTest, AWellFormedWitnessPairPasses) {
  auto at = [](int v) { return Outcome::of_int(v); };
  auto pr = [&](int a, int b) {
    return Outcome::of_tuple({at(a), at(b)});
  };
  SubDist mu = SubDist::from_entries({{at(0), 0.5}, {at(1), 0.5}});
  SubDist nu = SubDist::from_entries({{pr(0, 0), 0.5}, {pr(1, 1), 0.5}});
  std::vector<std::pair<Outcome, Outcome>> rel = {{at(0), at(0)},
                                                  {at(1), at(1)}};
  WitnessReport r = check_witness_pair(rel, nu, nu, Flavor::dp(0, 0), mu, mu);
  EXPECT_TRUE(r.ok) << r.detail;
  EXPECT_DOUBLE_EQ(r.observed.value(), 0.0);
}

TEST(WitnessTest, WitnessViolationsAreClassified) {
  auto at = [](int v) { return Outcome::of_int(v); };
  auto pr = [&](int a, int b) {
    return Outcome::of_tuple({at(a), at(b)});
  };
  SubDist mu = SubDist::from_entries({{at(0), 0.5}, {at(1), 0.5}});
  SubDist nu = SubDist::from_entries({{pr(0, 0), 0.5}, {pr(1, 1), 0.5}});
  std::vector<std::pair<Outcome, Outcome>> rel = {{at(0), at(0)},
                                                  {at(1), at(1)}};

  SubDist off = SubDist::from_entries({{pr(0, 1), 0.5}, {pr(1, 1), 0.5}});
  WitnessReport r = check_witness_pair(rel, off, nu, Flavor::dp(0, 0), mu, mu);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, Err::kSupportViolation);

  SubDist tilted = SubDist::from_entries({{pr(0, 0), 0.6}, {pr(1, 1), 0.4}});
  r = check_witness_pair(rel, tilted, nu, Flavor::dp(0, 0), mu, mu);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, Err::kMarginalMismatch);

  SubDist mu2 = SubDist::from_entries({{at(0), 0.3}, {at(1), 0.7}});
  SubDist nu2 = SubDist::from_entries({{pr(0, 0), 0.3}, {pr(1, 1), 0.7}});
  r = check_witness_pair(rel, nu, nu2, Flavor::dp(0, 0), mu, mu2);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, Err::kDivergenceExceeded);
  EXPECT_NEAR(r.observed.value(), 0.2, 1e-12);
}

// ---------------------------------------------------------------------------
// Empirical validation through the interpreter.

TEST(EmpiricalTest, LaplaceOutputsStayWithinTheirDpBudget) {
  Program p = parse_checked(
      "vars { x : real; y : real; } y <-$ lap(x, 2.0);");
  Judgment j = judge(p, "abs(x@1 - x@2) <= 1.0", "y@1 == y@2",
                     Flavor::dp(0.5, 0));
  InterpConfig cfg;
  cfg.grids["y"] = grid(0.5, 40.0, 1601);

  auto mem_x = [&](Rat v) {
    Memory m = zero_memory(p.ctx);
    m[static_cast<std::size_t>(p.ctx.index_of("x"))] = Outcome::of_real(v);
    return m;
  };
  std::vector<std::pair<Memory, Memory>> inputs = {
      {mem_x(Rat(0)), mem_x(Rat(1))},
      {mem_x(Rat(1, 2)), mem_x(Rat(0))},
  };
  ValidationReport rep = empirical_validate(j, inputs, cfg);
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.observed.size(), 2u);
  EXPECT_LE(rep.observed[0], rep.slack);

  // Claiming a tighter epsilon than the noise supports must show up.
  Judgment tight = j;
  tight.flavor = Flavor::dp(0.3, 0);
  rep = empirical_validate(tight, inputs, cfg);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_observed.value(), 0.05);

  std::vector<std::pair<Memory, Memory>> apart = {
      {mem_x(Rat(0)), mem_x(Rat(5))}};
  EXPECT_EQ(code_of([&] { empirical_validate(j, apart, cfg); }),
            Err::kPreconditionViolated);
}

}  // namespace
}  // namespace spanlift
