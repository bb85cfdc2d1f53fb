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

#include "spanlift/divergences.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "spanlift/density.hpp"
#include "spanlift/error.hpp"

namespace spanlift {
namespace {

SubDist bern(double p) {
  return SubDist::from_entries(
      {{Outcome::of_bool(true), p}, {Outcome::of_bool(false), 1.0 - p}});
}

TEST(FDivergenceTest, DpAtZeroIsTotalVariation) {
  // sum max(0, mu2 - mu1) over outcomes: Bern(3/4) vs Bern(1/4) gives 1/2.
  ExtReal v = dp_divergence(0.0, bern(0.75), bern(0.25));
  ASSERT_TRUE(v.is_finite());
  EXPECT_NEAR(v.value(), 0.5, 1e-15);
}

TEST(FDivergenceTest, DpDecaysWithEps) {
  // At eps = ln 2: max(0, 1/4 - 2*3/4) + max(0, 3/4 - 2*1/4) = 1/4.
  ExtReal v = dp_divergence(std::log(2.0), bern(0.75), bern(0.25));
  EXPECT_NEAR(v.value(), 0.25, 1e-15);
}

TEST(FDivergenceTest, FrozenSquareWeightExample) {
  // Delta^{t^2}(Bern(1/2), Bern(1/4)) = 1/4 / 1/4 + 1/4 / 3/4 = 4/3.
  ExtReal v = f_divergence(bern(0.5), bern(0.25), WeightFn::renyi(2.0));
  EXPECT_NEAR(v.value(), 4.0 / 3.0, 1e-12);
}

TEST(FDivergenceTest, HockeyStickIsSwappedDp) {
  SubDist a = bern(0.7), b = bern(0.2);
  EXPECT_EQ(hockey_stick(a, b, 0.3).value(),
            dp_divergence(0.3, b, a).value());
}

TEST(FDivergenceTest, SupportMismatchUnderRenyiWeight) {
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  EXPECT_EQ(f_divergence(point, bern(0.0), WeightFn::renyi(2.0)),
            ExtReal::pos_inf());
}

TEST(RenyiTest, FrozenOrderTwoExample) {
  // D^2(Bern(1/2) || Bern(1/4)) = ln(4/3).
  ExtReal v = renyi_divergence(2.0, bern(0.5), bern(0.25));
  EXPECT_NEAR(v.value(), std::log(4.0 / 3.0), 1e-12);
}

TEST(RenyiTest, DiracAgainstFairCoin) {
  // D^2(dirac(true) || Bern(1/2)) = ln 2, and the order does not matter
  // because a point mass has a single likelihood ratio.
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  for (double alpha : {1.5, 2.0, 4.0, 32.0}) {
    EXPECT_NEAR(renyi_divergence(alpha, point, bern(0.5)).value(),
                std::log(2.0), 1e-12);
  }
}

TEST(RenyiTest, MatchesFDivergenceRoute) {
  // exp((alpha - 1) D^alpha) equals the t^alpha f-divergence.
  SubDist a = bern(0.6), b = bern(0.35);
  double alpha = 3.0;
  double viaLog = renyi_divergence(alpha, a, b).value();
  double viaF = f_divergence(a, b, WeightFn::renyi(alpha)).value();
  EXPECT_NEAR(std::exp((alpha - 1.0) * viaLog), viaF, 1e-12);
}

TEST(RenyiTest, SupportMismatchAndNull) {
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  EXPECT_EQ(renyi_divergence(2.0, point, bern(0.0)), ExtReal::pos_inf());
  SubDist null = SubDist::from_entries({});
  EXPECT_EQ(renyi_divergence(2.0, null, bern(0.5)), ExtReal::neg_inf());
  EXPECT_THROW(renyi_divergence(1.0, point, bern(0.5)), Error);
}

TEST(RenyiTest, MomentIdentity) {
  // exp((alpha - 1) D^alpha(mu1 || mu2)) = E_{y ~ mu1} [L(y)^{alpha - 1}]
  // where L is the pointwise privacy loss.
  SubDist a = bern(0.6), b = bern(0.25);
  double alpha = 2.5;
  double lhs = std::exp((alpha - 1.0) * renyi_divergence(alpha, a, b).value());
  double rhs = 0;
  for (const auto& [y, m] : a.entries())
    rhs += m * std::pow(privacy_loss(a, b, y).value(), alpha - 1.0);
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(PrivacyLossTest, PointwiseCases) {
  SubDist a = bern(0.75), b = bern(0.25);
  EXPECT_NEAR(privacy_loss(a, b, Outcome::of_bool(true)).value(), 3.0, 1e-12);
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  EXPECT_EQ(privacy_loss(point, bern(0.0), Outcome::of_bool(true)),
            ExtReal::pos_inf());
  try {
    privacy_loss(a, b, Outcome::of_int(7));
    FAIL() << "expected undefined loss";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kUndefinedLoss);
  }
}

TEST(KlTest, FrozenValue) {
  // KL(dirac(true) || Bern(1/2)) = ln 2.
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  EXPECT_NEAR(kl_divergence(point, bern(0.5)).value(), std::log(2.0), 1e-15);
}

TEST(ZcdpTest, DiracAgainstFairCoinSupAtOne) {
  // D^alpha is constantly ln 2, so (D^alpha - 0)/alpha is maximized in the
  // alpha -> 1 limit, which the certificate reports as argmax 1.
  SupCertificate c = zcdp_divergence(0.0, SubDist::dirac(Outcome::of_bool(true)),
                                     bern(0.5));
  EXPECT_NEAR(c.value.value(), std::log(2.0), 1e-9);
  EXPECT_EQ(c.argmax_alpha, ExtReal(1.0));
  EXPECT_EQ(c.grid_points, 200);
}

TEST(ZcdpTest, IdenticalDistributionsGiveZero) {
  SupCertificate c = zcdp_divergence(0.7, bern(0.3), bern(0.3));
  EXPECT_EQ(c.value, ExtReal(0.0));
  EXPECT_EQ(c.argmax_alpha, ExtReal::pos_inf());
}

TEST(ZcdpTest, CertificateInvariantHolds) {
  SubDist a = bern(0.7), b = bern(0.4);
  SupCertificate c = zcdp_divergence(0.0, a, b);
  ASSERT_TRUE(c.value.is_finite());
  ASSERT_TRUE(c.argmax_alpha.is_finite());
  EXPECT_TRUE(c.refined);
  if (c.argmax_alpha.value() > 1.0) {
    double alpha = c.argmax_alpha.value();
    double h = renyi_divergence(alpha, a, b).value() / alpha;
    EXPECT_NEAR(c.value.value(), h, 1e-9);
  }
  // Value dominates every probe of h.
  for (double alpha : {1.5, 2.0, 5.0, 20.0, 100.0}) {
    double h = renyi_divergence(alpha, a, b).value() / alpha;
    EXPECT_GE(c.value.to_double() + 1e-9, h);
  }
}

TEST(ZcdpTest, SupportMismatchAndNull) {
  SubDist point = SubDist::dirac(Outcome::of_bool(true));
  EXPECT_EQ(zcdp_divergence(0.0, point, bern(0.0)).value, ExtReal::pos_inf());
  SubDist null = SubDist::from_entries({});
  EXPECT_EQ(zcdp_divergence(0.0, null, bern(0.5)).value, ExtReal::neg_inf());
  EXPECT_THROW(zcdp_divergence(-0.1, point, bern(0.5)), Error);
}

TEST(TcdpTest, BoundedRangeRespectsOmega) {
  SubDist a = bern(0.7), b = bern(0.4);
  SupCertificate c = tcdp_divergence(4.0, a, b);
  ASSERT_TRUE(c.argmax_alpha.is_finite());
  EXPECT_GT(c.argmax_alpha.to_double(), 1.0 - 1e-9);
  EXPECT_LT(c.argmax_alpha.to_double(), 4.0 + 1e-9);
  // Never exceeds the unconstrained zCDP supremum.
  SupCertificate z = zcdp_divergence(0.0, a, b);
  EXPECT_LE(c.value.to_double(), z.value.to_double() + 1e-9);
  EXPECT_THROW(tcdp_divergence(1.0, a, b), Error);
}

TEST(TcdpTest, SubprobabilityCanGoNegative) {
  // With both scaled to mass 1/2, every Renyi order is negative and the
  // bounded sup stays negative.
  SubDist a = bern(0.6).scaled(0.5);
  SupCertificate c = tcdp_divergence(2.0, a, a);
  EXPECT_LT(c.value.to_double(), 0.0);
}

TEST(GaussianPairTest, DiscretizedMatchesClosedForms) {
  // N(0,1) vs N(1,1) on [-10, 10] with 20001 cells.
  GridSpec g{Rat(0), Rat(10), 20001};
  SubDist p = discretize_density(gaussian_density(0.0, 1.0), g).dist;
  SubDist q = discretize_density(gaussian_density(1.0, 1.0), g).dist;
  // D^2 = alpha r^2 / (2 sigma^2) = 1.
  EXPECT_NEAR(renyi_divergence(2.0, p, q).value(), 1.0, 1e-3);
  EXPECT_NEAR(renyi_closed_form(
                  2.0, {ParamDensity::Kind::kGauss, 0.0, 1.0},
                  {ParamDensity::Kind::kGauss, 1.0, 1.0})
                  .value(),
              1.0, 1e-15);
  // zCDP at xi = 0 and 10-tCDP both equal r^2 / (2 sigma^2) = 1/2.
  SupCertificate z = zcdp_divergence(0.0, p, q);
  EXPECT_NEAR(z.value.value(), 0.5, 2e-3);
  SupCertificate t = tcdp_divergence(10.0, p, q);
  EXPECT_NEAR(t.value.value(), 0.5, 2e-3);
}

TEST(ClosedFormTest, LaplacePairMatchesDiscretized) {
  // Laplace(0, 2) vs Laplace(1, 2) at alpha = 2 against a fine grid.
  double lam = 2.0, alpha = 2.0, r = 1.0;
  ExtReal cf = renyi_closed_form(alpha, {ParamDensity::Kind::kLaplace, 0.0, lam},
                                 {ParamDensity::Kind::kLaplace, r, lam});
  GridSpec g{Rat(0), Rat(60), 40001};
  SubDist p = discretize_density(laplace_density(0.0, lam), g).dist;
  SubDist q = discretize_density(laplace_density(r, lam), g).dist;
  EXPECT_NEAR(renyi_divergence(alpha, p, q).value(), cf.value(), 1e-4);
}

TEST(ClosedFormTest, UnsupportedPairs) {
  try {
    renyi_closed_form(2.0, {ParamDensity::Kind::kGauss, 0.0, 1.0},
                      {ParamDensity::Kind::kLaplace, 0.0, 1.0});
    FAIL() << "expected unsupported pair";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kUnsupportedPair);
  }
  try {
    renyi_closed_form(2.0, {ParamDensity::Kind::kGauss, 0.0, 1.0},
                      {ParamDensity::Kind::kGauss, 0.0, 2.0});
    FAIL() << "expected unsupported pair";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kUnsupportedPair);
  }
}

TEST(PartitionTest, SingletonPartitionIsExact) {
  SubDist a = bern(0.6), b = bern(0.35);
  Partition singletons = {{Outcome::of_bool(false)}, {Outcome::of_bool(true)}};
  for (const auto& w : {WeightFn::renyi(2.0), WeightFn::dp(0.1)}) {
    ExtReal full = f_divergence(a, b, w);
    ExtReal part = partition_lower_bound(a, b, singletons, w);
    // Bit-for-bit identical: same terms, same summation order.
    EXPECT_EQ(part.to_double(), full.to_double());
  }
}

TEST(PartitionTest, CoarseningOnlyLowers) {
  SubDist a = SubDist::from_entries({{Outcome::of_int(0), 0.5},
                                     {Outcome::of_int(1), 0.3},
                                     {Outcome::of_int(2), 0.2}});
  SubDist b = SubDist::from_entries({{Outcome::of_int(0), 0.2},
                                     {Outcome::of_int(1), 0.3},
                                     {Outcome::of_int(2), 0.5}});
  WeightFn w = WeightFn::renyi(2.0);
  ExtReal full = f_divergence(a, b, w);
  Partition coarse = {{Outcome::of_int(0), Outcome::of_int(1)},
                      {Outcome::of_int(2)}};
  Partition coarsest = {{Outcome::of_int(0), Outcome::of_int(1),
                         Outcome::of_int(2)}};
  double v2 = partition_lower_bound(a, b, coarse, w).value();
  double v1 = partition_lower_bound(a, b, coarsest, w).value();
  EXPECT_LE(v1, v2 + 1e-12);
  EXPECT_LE(v2, full.value() + 1e-12);
}

TEST(PartitionTest, RejectsOverlapAndGaps) {
  SubDist a = bern(0.6), b = bern(0.35);
  try {
    partition_lower_bound(
        a, b, {{Outcome::of_bool(true)}, {Outcome::of_bool(true)}},
        WeightFn::dp(0.0));
    FAIL() << "expected overlap rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kInvalidPartition);
  }
  try {
    partition_lower_bound(a, b, {{Outcome::of_bool(true)}}, WeightFn::dp(0.0));
    FAIL() << "expected gap rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kInvalidPartition);
  }
}

TEST(PropertyTest, SpotChecks) {
  SubDist a = bern(0.6), b = bern(0.35), c = bern(0.5), d = bern(0.25);
  EXPECT_TRUE(check_reflexive(DivergenceSpec::renyi(2.0), a).holds);
  EXPECT_TRUE(check_additive(DivergenceSpec::dp(0.3), a, b, c, d).holds);
  EXPECT_TRUE(check_monotone_alpha(1.5, 4.0, a, b).holds);
  EXPECT_TRUE(check_weak_triangle(2.0, 2.0, a, b, c).holds);
  auto collapse = [](const Outcome&) { return Outcome::of_int(0); };
  EXPECT_TRUE(check_dpi(DivergenceSpec::zcdp(0.0), a, b, collapse).holds);
}

TEST(PropertyTest, SmallRandomSuites) {
  for (auto prop : {Property::kReflexive, Property::kDpi, Property::kAdditive,
                    Property::kComposable}) {
    for (auto spec :
         {DivergenceSpec::dp(std::log(2.0)), DivergenceSpec::renyi(2.0),
          DivergenceSpec::zcdp(0.1), DivergenceSpec::tcdp(2.0)}) {
      SuiteReport r = run_property_suite(prop, spec, 60, 41);
      EXPECT_EQ(r.failures, 0)
          << property_name(prop) << " family " << static_cast<int>(spec.family)
          << " worst gap " << r.worst_gap;
    }
  }
  SuiteReport mono = run_property_suite(Property::kMonotoneAlpha,
                                        DivergenceSpec::renyi(2.0), 60, 43);
  EXPECT_EQ(mono.failures, 0);
  SuiteReport tri = run_property_suite(Property::kWeakTriangle,
                                       DivergenceSpec::renyi(2.0), 60, 44);
  EXPECT_EQ(tri.failures, 0);
}

TEST(PropertyTest, UnsupportedCombinations) {
  try {
    run_property_suite(Property::kWeakTriangle, DivergenceSpec::tcdp(2.0), 1,
                       1);
    FAIL() << "expected unsupported property";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kUnsupportedProperty);
  }
  try {
    run_property_suite(Property::kMonotoneAlpha, DivergenceSpec::dp(0.0), 1,
                       1);
    FAIL() << "expected unsupported property";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Err::kUnsupportedProperty);
  }
}

}  // namespace
}  // namespace spanlift
