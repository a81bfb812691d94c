#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dascmop/metrics.hpp"
#include "dascmop/problems.hpp"
#include "support.hpp"

using namespace dascmop;

TEST(Problems, LinkedDistanceVanishes) {
  const auto inst = make_das_cmop(1, {0, 0, 0});
  std::vector<double> x(30);
  x[0] = 0.5;
  for (std::size_t j = 2; j <= 30; ++j) {
    x[j - 1] = j % 2 == 1 ? std::sin(0.25 * std::numbers::pi) : std::cos(0.25 * std::numbers::pi);
  }
  const auto ev = inst.evaluate(x);
  EXPECT_NEAR(ev.f[0], 0.5, 1e-12);
  EXPECT_NEAR(ev.f[1], 0.75, 1e-12);
}

TEST(Problems, RastriginMinimumAtHalf) {
  const auto inst = make_das_cmop(4, {0, 0, 0});
  for (double x1 : {0.0, 0.3, 0.77, 1.0}) {
    std::vector<double> x(30, 0.5);
    x[0] = x1;
    const auto ev = inst.evaluate(x);
    EXPECT_NEAR(ev.f[0], x1, 1e-12);
    EXPECT_NEAR(ev.f[1], 1.0 - x1 * x1, 1e-12);
  }
}

TEST(Problems, LinearSimplexCorner) {
  const auto inst = make_das_cmop(7, {0, 0, 0});
  std::vector<double> x(30, 0.5);
  x[0] = 1.0;
  x[1] = 1.0;
  const auto ev = inst.evaluate(x);
  EXPECT_NEAR(ev.f[0], 1.0, 1e-12);
  EXPECT_NEAR(ev.f[1], 0.0, 1e-12);
  EXPECT_NEAR(ev.f[2], 0.0, 1e-12);
}

TEST(Problems, LinkedThreeObjectiveDistanceVanishesOnManifold) {
  const auto inst = make_das_cmop(9, {0, 0, 0});
  std::vector<double> x(30);
  x[0] = 0.3;
  x[1] = 0.6;
  for (std::size_t j = 3; j <= 30; ++j) x[j - 1] = std::cos(0.25 * j / 30.0 * std::numbers::pi * 0.9);
  const auto ev = inst.evaluate(x);
  const auto pf = unconstrained_pf_point(inst, std::vector<double>{0.3, 0.6});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(ev.f[k], pf[k], 1e-12);
}

TEST(Problems, ShapeAgreesWithClosedForms) {
  const double s = 0.37;
  const std::vector<double> sv{s};
  const auto f1 = unconstrained_pf_point(make_das_cmop(1, {}), sv);
  const auto f2 = unconstrained_pf_point(make_das_cmop(5, {}), sv);
  const auto f3 = unconstrained_pf_point(make_das_cmop(6, {}), sv);
  EXPECT_NEAR(f1[1], 1 - s * s, 1e-15);
  EXPECT_NEAR(f2[1], 1 - std::sqrt(s), 1e-15);
  EXPECT_NEAR(f3[1], 1 - std::sqrt(s) + 0.5 * std::abs(std::sin(5 * std::numbers::pi * s)), 1e-15);
  const std::vector<double> s2{0.2, 0.7};
  const auto f7 = unconstrained_pf_point(make_das_cmop(7, {}), s2);
  EXPECT_NEAR(f7[0], 0.14, 1e-15);
  EXPECT_NEAR(f7[1], 0.7 * 0.8, 1e-15);
  EXPECT_NEAR(f7[2], 0.3, 1e-15);
}

TEST(UnconstrainedFront, ConvexMidpoint) {
  const auto pf = unconstrained_pf_point(make_das_cmop(1, {}), std::vector<double>{0.5});
  EXPECT_NEAR(pf[0], 0.5, 1e-15);
  EXPECT_NEAR(pf[1], 0.75, 1e-15);
}

TEST(UnconstrainedFront, SpherePole) {
  const auto pf = unconstrained_pf_point(make_das_cmop(8, {}), std::vector<double>{0, 0});
  EXPECT_NEAR(pf[0], 1.0, 1e-15);
  EXPECT_NEAR(pf[1], 0.0, 1e-15);
  EXPECT_NEAR(pf[2], 0.0, 1e-15);
}

TEST(UnconstrainedFront, ConcaveQuarter) {
  const auto pf = unconstrained_pf_point(make_das_cmop(2, {}), std::vector<double>{0.25});
  EXPECT_NEAR(pf[0], 0.25, 1e-15);
  EXPECT_NEAR(pf[1], 0.5, 1e-15);
}

TEST(UnconstrainedFront, RejectsOutsideBox) {
  EXPECT_THROW((void)unconstrained_pf_point(make_das_cmop(1, {}), std::vector<double>{1.5}), ContractError);
}

TEST(ConstraintCount, PerGroup) {
  EXPECT_EQ(constraint_count(make_das_cmop(1, {})), 12u);
  EXPECT_EQ(constraint_count(make_das_cmop(4, {})), 11u);
  EXPECT_EQ(constraint_count(make_das_cmop(7, {})), 7u);
  for (int id = 1; id <= 9; ++id) {
    const auto inst = make_das_cmop(id, {});
    EXPECT_EQ(inst.num_variables(), 30u);
    EXPECT_EQ(inst.num_objectives(), id <= 6 ? 2u : 3u);
    EXPECT_EQ(constraint_count(inst), id <= 3 ? 12u : id <= 6 ? 11u : 7u);
  }
}

TEST(ProblemNames, RoundTrip) {
  for (int id = 1; id <= 9; ++id) EXPECT_EQ(parse_problem_name(problem_name(id)), id);
  EXPECT_EQ(parse_problem_name("DAS-CMOP3"), 3);
  EXPECT_EQ(parse_problem_name("5"), 5);
  EXPECT_THROW((void)parse_problem_name("das-cmop10"), ContractError);
  EXPECT_THROW((void)parse_problem_name("das-cmop"), ContractError);
  EXPECT_THROW((void)make_das_cmop(0, {}), ContractError);
}

TEST(Problems, VariableCountOverride) {
  const auto inst = make_das_cmop(4, {0.5, 0.5, 0.5}, 10);
  EXPECT_EQ(inst.num_variables(), 10u);
  std::vector<double> x(10, 0.5);
  x[0] = 0.2;
  EXPECT_NEAR(inst.evaluate(x).f[1], 0.96, 1e-12);
}

TEST(Problems, ZeroTripletNeverViolated) {
  testsupport::Gen gen(31);
  for (int id = 1; id <= 9; ++id) {
    const auto inst = make_das_cmop(id, {0, 0, 0});
    for (int i = 0; i < 20000; ++i) {
      const auto sol = inst.evaluate_solution(gen.vec(30));
      ASSERT_EQ(sol.violation, 0.0);
    }
  }
}

TEST(Problems, RastriginDistanceNonnegative) {
  testsupport::Gen gen(32);
  const auto inst = make_das_cmop(5, {0, 0, 0});
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200000; ++i) {
    auto x = gen.vec(30);
    const auto ev = inst.evaluate(x);
    lowest = std::min(lowest, ev.f[0] - x[0]);
  }
  EXPECT_GE(lowest, 0.0);
}

TEST(Problems, BandHoldsAtFeasiblePoints) {
  // Build feasible points by placing the odd and even tails around their
  // targets so both distances land in the band.
  const auto inst = make_das_cmop(1, {0, 0.5, 0});
  const double e = inst.params().e;
  testsupport::Gen gen(33);
  int feasible = 0;
  for (int i = 0; i < 20000; ++i) {
    std::vector<double> x(30);
    x[0] = gen.unit();
    const double spread = gen.range(0.1, 0.4);
    for (std::size_t j = 2; j <= 30; ++j) {
      const double target = j % 2 == 1 ? std::sin(0.5 * std::numbers::pi * x[0]) : std::cos(0.5 * std::numbers::pi * x[0]);
      x[j - 1] = std::clamp(target + gen.range(-spread, spread), 0.0, 1.0);
    }
    const auto sol = inst.evaluate_solution(x);
    if (!sol.feasible()) continue;
    ++feasible;
    const double g1 = sol.f[0] - x[0];
    const double g2 = sol.f[1] - (1 - x[0] * x[0]);
    ASSERT_GE(g1, 0.5 - 1e-12);
    ASSERT_LE(g1, e + 1e-12);
    ASSERT_GE(g2, 0.5 - 1e-12);
    ASSERT_LE(g2, e + 1e-12);
  }
  EXPECT_GT(feasible, 100);
}

TEST(Problems, FeasibleRatioDecreasesWithZeta) {
  double prev = feasible_ratio_mc(make_das_cmop(1, {0, 0, 0}), 100000, 7);
  EXPECT_EQ(prev, 1.0);
  for (double zeta : {0.25, 0.5, 0.75}) {
    const double ratio = feasible_ratio_mc(make_das_cmop(1, {0, zeta, 0}), 100000, 7);
    EXPECT_LT(ratio, prev) << "zeta " << zeta;
    prev = ratio;
  }
}

TEST(Problems, HalfEtaSegmentMeasure) {
  for (int id = 1; id <= 3; ++id) {
    const auto inst = make_das_cmop(id, {0.5, 0, 0});
    std::size_t ok = 0;
    const std::size_t samples = 200000;
    std::vector<double> seg(1);
    for (std::size_t i = 0; i < samples; ++i) {
      const std::vector<double> s{(static_cast<double>(i) + 0.5) / samples};
      inst.segment_constraints(s, seg);
      if (seg[0] >= 0.0) ++ok;
    }
    EXPECT_NEAR(static_cast<double>(ok) / samples, 0.5, 1e-3);
  }
}

TEST(BuiltinTriplets, SixteenValidDistinct) {
  const auto t = builtin_triplets();
  ASSERT_EQ(t.size(), 16u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_TRUE(t[i].valid());
    for (std::size_t j = 0; j < i; ++j) EXPECT_FALSE(t[i] == t[j]);
  }
  EXPECT_EQ(t.front(), (DifficultyTriplet{0, 0, 0}));
  EXPECT_EQ(t[12], (DifficultyTriplet{1, 0, 0}));
  EXPECT_EQ(t.back(), (DifficultyTriplet{0.75, 0.75, 0.75}));
}
