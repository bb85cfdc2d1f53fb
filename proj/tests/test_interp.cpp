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

#include "spanlift/interp.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spanlift/density.hpp"
#include "spanlift/dist.hpp"
#include "spanlift/lang.hpp"

namespace spanlift {
namespace {

Program parse_checked(const std::string& src) {
  Program p = parse_program(src);
  typecheck_program(p);
  return p;
}

double mass_at(const SubDist& d, const Outcome& o) {
  for (const auto& [x, m] : d.entries())
    if (!(x < o) && !(o < x)) return m;
  return 0.0;
}

GridSpec grid(double center, double halfwidth, std::int64_t bins) {
  GridSpec g;
  g.center = round_to_quantum(center, Rat(1, 1000000));
  g.halfwidth = round_to_quantum(halfwidth, Rat(1, 1000000));
  g.bins = bins;
  return g;
}

TEST(EvalPexprTest, DiracAndBernAreExact) {
  Program p = parse_checked("vars { x : real; b : bool; } skip;");
  Memory m = zero_memory(p.ctx);
  m[0] = Outcome::of_real(Rat(7, 2));
  InterpConfig cfg;

  PExpr pe;
  pe.kind = PExpr::Kind::kDirac;
  pe.args = {Expr::of_var("x")};
  SubDist d = eval_pexpr(p.ctx, m, pe, cfg, "x");
  ASSERT_EQ(d.entries().size(), 1u);
  EXPECT_EQ(mass_at(d, Outcome::of_real(Rat(7, 2))), 1.0);

  pe.kind = PExpr::Kind::kBern;
  pe.args = {Expr::of_real(Rat(1, 4))};
  d = eval_pexpr(p.ctx, m, pe, cfg, "b");
  EXPECT_DOUBLE_EQ(mass_at(d, Outcome::of_bool(true)), 0.25);
  EXPECT_DOUBLE_EQ(mass_at(d, Outcome::of_bool(false)), 0.75);

  pe.args = {Expr::of_real(Rat(1))};
  d = eval_pexpr(p.ctx, m, pe, cfg, "b");
  ASSERT_EQ(d.entries().size(), 1u);
  EXPECT_EQ(mass_at(d, Outcome::of_bool(true)), 1.0);

  pe.args = {Expr::of_real(Rat(3, 2))};
  EXPECT_THROW(eval_pexpr(p.ctx, m, pe, cfg, "b"), Error);
}

TEST(EvalPexprTest, ContinuousSamplersNeedAGrid) {
  Program p = parse_checked("vars { z : real; } skip;");
  Memory m = zero_memory(p.ctx);
  InterpConfig cfg;

  PExpr pe;
  pe.kind = PExpr::Kind::kGauss;
  pe.args = {Expr::of_real(Rat(0)), Expr::of_real(Rat(1))};
  try {
    eval_pexpr(p.ctx, m, pe, cfg, "z");
    FAIL() << "expected MISSING_GRID";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kMissingGrid);
  }

  cfg.grids["z"] = grid(0.0, 10.0, 20001);
  InterpStats stats;
  SubDist d = eval_pexpr(p.ctx, m, pe, cfg, "z", &stats);
  EXPECT_GE(d.total_mass(), 1.0 - 1e-15);
  EXPECT_LE(d.total_mass(), 1.0 + 1e-12);
  EXPECT_LE(stats.dropped_tail, 1e-20);
  // Symmetry of the standard normal about the grid center.
  double lo = 0, hi = 0;
  for (const auto& [x, w] : d.entries()) {
    double v = x.as_rat().to_double();
    if (v < 0) lo += w;
    if (v > 0) hi += w;
  }
  EXPECT_NEAR(lo, hi, 1e-12);
}

TEST(EvalPexprTest, LaplaceAndSinhGridsCoverTheirMass) {
  Program p = parse_checked("vars { z : real; } skip;");
  Memory m = zero_memory(p.ctx);
  InterpConfig cfg;
  cfg.grids["z"] = grid(1.0, 40.0, 4001);

  PExpr pe;
  pe.kind = PExpr::Kind::kLap;
  pe.args = {Expr::of_real(Rat(1)), Expr::of_real(Rat(2))};
  SubDist d = eval_pexpr(p.ctx, m, pe, cfg, "z");
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-8);

  pe.kind = PExpr::Kind::kSinhGauss;
  pe.args = {Expr::of_real(Rat(1)), Expr::of_real(Rat(5)),
             Expr::of_real(Rat(2))};
  d = eval_pexpr(p.ctx, m, pe, cfg, "z");
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-8);
}

TEST(EvalCmdTest, SkipIsIdentityAndAssignIsDeterministic) {
  Program p = parse_checked("vars { x : int; } x <- 1; x <- x + 1;");
  InterpConfig cfg;
  SubDist mu = SubDist::dirac(pack_memory(zero_memory(p.ctx)));

  EXPECT_EQ(eval_cmd(p.ctx, Cmd::skip(), mu, cfg).entries(), mu.entries());

  SubDist out = eval_cmd(p.ctx, p.body, mu, cfg);
  ASSERT_EQ(out.entries().size(), 1u);
  EXPECT_EQ(memory_of(out.entries()[0].first)[0].as_int(), 2);
  EXPECT_EQ(out.entries()[0].second, 1.0);
}

TEST(EvalCmdTest, AssignWidensIntIntoRealSlots) {
  Program p = parse_checked("vars { x : real; v : real[2]; i : int; }"
                            " x <- 3; v[i] <- 4;");
  InterpConfig cfg;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg);
  const Memory& m = memory_of(out.entries()[0].first);
  EXPECT_TRUE(m[0].is_real());
  EXPECT_EQ(compare(m[0].as_real(), Rat(3)), 0);
  EXPECT_TRUE(m[1].as_tuple()[0].is_real());
  EXPECT_EQ(compare(m[1].as_tuple()[0].as_real(), Rat(4)), 0);
}

TEST(EvalCmdTest, TwoCoinsGiveTheProductDistribution) {
  Program p = parse_checked(
      "vars { a : bool; b : bool; c : bool; }"
      " a <-$ bern(0.5); b <-$ bern(0.25); c <- a && b;");
  InterpConfig cfg;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg);
  ASSERT_EQ(out.entries().size(), 4u);
  EXPECT_NEAR(out.total_mass(), 1.0, 1e-15);
  SubDist c = project_var(p.ctx, out, "c");
  EXPECT_NEAR(mass_at(c, Outcome::of_bool(true)), 0.125, 1e-15);
  EXPECT_NEAR(mass_at(c, Outcome::of_bool(false)), 0.875, 1e-15);
}

TEST(EvalCmdTest, IteSplitsByTheGuard) {
  Program p = parse_checked(
      "vars { b : bool; x : int; }"
      " b <-$ bern(0.3); if b { x <- 1; } else { x <- 2; }");
  InterpConfig cfg;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg);
  SubDist x = project_var(p.ctx, out, "x");
  EXPECT_NEAR(mass_at(x, Outcome::of_int(1)), 0.3, 1e-15);
  EXPECT_NEAR(mass_at(x, Outcome::of_int(2)), 0.7, 1e-15);
}

TEST(EvalCmdTest, DivergentLoopDropsToTheNullMeasure) {
  Program p = parse_checked("vars { x : int; } while true { skip; }");
  InterpConfig cfg;
  cfg.fuel = 5;
  InterpStats stats;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg,
                         &stats);
  EXPECT_EQ(out.entries().size(), 0u);
  EXPECT_DOUBLE_EQ(stats.residual_mass, 1.0);
}

TEST(EvalCmdTest, BoundedLoopCompletesWithFuelEqualToItsBound) {
  Program p = parse_checked(
      "vars { i : int; s : int; }"
      " while i < 6 bound 6 { s <- s + i; i <- i + 1; }");
  InterpConfig cfg;
  cfg.fuel = 6;
  InterpStats stats;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg,
                         &stats);
  EXPECT_DOUBLE_EQ(stats.residual_mass, 0.0);
  ASSERT_EQ(out.entries().size(), 1u);
  EXPECT_EQ(memory_of(out.entries()[0].first)[1].as_int(), 15);
}

TEST(EvalCmdTest, OutputMassIsNondecreasingInFuel) {
  // A geometric loop: each iteration exits with probability 1/2.
  Program p = parse_checked(
      "vars { b : bool; n : int; }"
      " b <- true; while b { b <-$ bern(0.5); n <- n + 1; }");
  double prev = 0;
  for (std::int64_t fuel = 1; fuel <= 12; ++fuel) {
    InterpConfig cfg;
    cfg.fuel = fuel;
    SubDist out = eval_cmd(
        p.ctx, p.body, SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg);
    EXPECT_GE(out.total_mass() + 1e-15, prev) << "fuel " << fuel;
    EXPECT_LE(out.total_mass(), 1.0 + 1e-12);
    prev = out.total_mass();
  }
  // With fuel k the loop has exited after at most k coin flips.
  EXPECT_NEAR(prev, 1.0 - std::pow(0.5, 12.0), 1e-12);
}

TEST(EvalCmdTest, SequencingAgreesWithKleisliComposition) {
  Program p = parse_checked(
      "vars { a : bool; x : int; }"
      " a <-$ bern(0.5); if a { x <- 1; } else { x <- 2; }");
  ASSERT_EQ(p.body.kind, Cmd::Kind::kSeq);
  const Cmd& c1 = p.body.kids[0];
  const Cmd& c2 = p.body.kids[1];
  InterpConfig cfg;
  SubDist mu = SubDist::dirac(pack_memory(zero_memory(p.ctx)));

  SubDist direct = eval_cmd(p.ctx, p.body, mu, cfg);
  SubDist staged = spanlift::bind(
      eval_cmd(p.ctx, c1, mu, cfg), [&](const Outcome& m) {
        return eval_cmd(p.ctx, c2, SubDist::dirac(m), cfg);
      });
  ASSERT_EQ(direct.entries().size(), staged.entries().size());
  for (std::size_t i = 0; i < direct.entries().size(); ++i) {
    EXPECT_FALSE(direct.entries()[i].first < staged.entries()[i].first);
    EXPECT_FALSE(staged.entries()[i].first < direct.entries()[i].first);
    EXPECT_DOUBLE_EQ(direct.entries()[i].second, staged.entries()[i].second);
  }
}

TEST(EvalCmdTest, DeterministicMeanLoopYieldsADiracAtTheMean) {
  Program p = parse_checked(
      "vars { D : real[4]; s : real; m : real; i : int; }"
      " i <- 0; s <- 0.0;"
      " while i < 4 bound 4 { s <- s + D[i]; i <- i + 1; }"
      " m <- s / 4.0;");
  std::vector<std::vector<Rat>> datasets = {
      {Rat(1), Rat(0), Rat(1), Rat(1)},
      {Rat(0), Rat(0), Rat(0), Rat(0)},
      {Rat(1, 2), Rat(3, 2), Rat(5, 2), Rat(7, 2)},
  };
  for (const auto& data : datasets) {
    Memory m = zero_memory(p.ctx);
    Outcome::Tuple d;
    Rat sum(0);
    for (const Rat& r : data) {
      d.push_back(Outcome::of_real(r));
      sum = *checked_add(sum, r);
    }
    m[0] = Outcome::of_tuple(std::move(d));
    InterpConfig cfg;
    cfg.fuel = 4;
    SubDist out = eval_cmd(p.ctx, p.body, SubDist::dirac(pack_memory(m)), cfg);
    ASSERT_EQ(out.entries().size(), 1u);
    SubDist mean = project_var(p.ctx, out, "m");
    Rat expect = *checked_div(sum, Rat(4));
    EXPECT_EQ(compare(mean.entries()[0].first.as_real(), expect), 0);
  }
}

TEST(EvalCmdTest, MatchedGridsKeepLoopSupportsOnTheGrid) {
  // Additive noise resampled onto one fixed grid: the support never grows
  // past the grid size, because every sample overwrites z with a midpoint.
  Program p = parse_checked(
      "vars { z : real; i : int; }"
      " while i < 3 bound 3 { z <-$ gauss(z, 4.0); i <- i + 1; }");
  InterpConfig cfg;
  cfg.fuel = 3;
  cfg.grids["z"] = grid(0.0, 20.0, 401);
  InterpStats stats;
  SubDist out = eval_cmd(p.ctx, p.body,
                         SubDist::dirac(pack_memory(zero_memory(p.ctx))), cfg,
                         &stats);
  EXPECT_LE(out.entries().size(), 401u);
  EXPECT_GE(out.total_mass(), 1.0 - 1e-6);
  EXPECT_LT(stats.dropped_tail, 1e-6);
}

TEST(RunProgramTest, ReportsItemizeTheMassBudget) {
  Program p = parse_checked(
      "vars { b : bool; z : real; n : int; }"
      " b <- true;"
      " while b { z <-$ gauss(z, 1.0); b <-$ bern(0.5); n <- n + 1; }");
  InterpConfig cfg;
  cfg.fuel = 4;
  cfg.dust_tol = 1e-6;
  cfg.grids["z"] = grid(0.0, 12.0, 241);
  SubDist out;
  OracleReport r = run_program(p, zero_memory(p.ctx), cfg, &out);
  EXPECT_EQ(r.output_support_size, out.entries().size());
  EXPECT_NEAR(r.residual_mass, std::pow(0.5, 4.0), 1e-9);
  EXPECT_TRUE(r.fuel_exhausted);
  EXPECT_GT(r.output_support_size, 0u);
  // Everything that went in is either in the output or itemized as loss.
  double accounted =
      r.output_mass + r.residual_mass + r.dropped_tail + r.rounding_dust;
  EXPECT_NEAR(accounted, 1.0, 1e-7);
}

TEST(RunProgramTest, FuelFlagStaysOffWhenResidualIsTiny) {
  Program p = parse_checked("vars { i : int; } while i < 2 bound 2 "
                            "{ i <- i + 1; }");
  InterpConfig cfg;
  cfg.fuel = 8;
  OracleReport r = run_program(p, zero_memory(p.ctx), cfg);
  EXPECT_FALSE(r.fuel_exhausted);
  EXPECT_EQ(r.residual_mass, 0.0);
  EXPECT_EQ(r.output_support_size, 1u);
}

TEST(LosslessTest, LoopFreeAndBoundedLoopsPass) {
  InterpConfig cfg;
  cfg.fuel = 3;
  Program p1 = parse_checked("vars { x : int; } x <- 1;");
  EXPECT_TRUE(lossless_check(p1, {zero_memory(p1.ctx)}, cfg).pass);

  Program p2 =
      parse_checked("vars { i : int; } while i < 3 bound 3 { i <- i + 1; }");
  LosslessReport r = lossless_check(p2, {zero_memory(p2.ctx)}, cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.worst_deficit, 0.0);
}

TEST(LosslessTest, DivergentLoopFails) {
  Program p = parse_checked("vars { x : int; } while true { skip; }");
  InterpConfig cfg;
  cfg.fuel = 3;
  LosslessReport r = lossless_check(p, {zero_memory(p.ctx)}, cfg);
  EXPECT_FALSE(r.pass);
  EXPECT_DOUBLE_EQ(r.worst_deficit, 1.0);
}

TEST(InterpConfigTest, ValidationRejectsBadParameters) {
  InterpConfig cfg;
  cfg.fuel = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.fuel = 1;
  cfg.dust_tol = 1e-3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.dust_tol = 1e-9;
  cfg.grids["z"] = GridSpec{};
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace spanlift
