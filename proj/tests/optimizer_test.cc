#include "wncs/optimizer.h"

#include <cmath>

#include <gtest/gtest.h>

#include "wncs/error.h"
#include "wncs/reference.h"

namespace wncs {
namespace {

void ExpectVerified(const ChannelModel& ch, const RateTarget& rt,
                    const OptimizationOutcome& out) {
  const PolicyVerification v = VerifyPolicy(ch, rt, out.policy);
  EXPECT_TRUE(v.pass);
  EXPECT_LE(v.beta, rt.mu() + 1e-9);
  EXPECT_TRUE(out.verification.pass);
  EXPECT_GT(out.candidates_examined, 0);
}

double RelGap(double a, double b) { return (a - b) / std::abs(b); }

TEST(ModeNameTest, Names) {
  EXPECT_EQ(ModeName(OptimizationMode::kPureChannel), "pure-channel");
  EXPECT_EQ(ModeName(OptimizationMode::kPureTime), "pure-time");
  EXPECT_EQ(ModeName(OptimizationMode::kEpsLoss), "eps-loss");
  EXPECT_EQ(ModeName(OptimizationMode::kUnsaturatedInversion), "unsaturated");
  EXPECT_EQ(ModeName(OptimizationMode::kGeneralGrid), "general");
}

TEST(BetterCandidateTest, TieBreak) {
  const ThresholdPolicy a{1, 0.5, PowerRule::kConstant, 2.0, true};
  ThresholdPolicy b = a;
  EXPECT_TRUE(BetterCandidate(1.0, a, 2.0, b));
  b.n = 2;
  EXPECT_TRUE(BetterCandidate(1.0, a, 1.0, b));
  b = a;
  b.hbar = 0.6;
  EXPECT_TRUE(BetterCandidate(1.0, a, 1.0, b));
  b = a;
  b.power = 2.5;
  EXPECT_TRUE(BetterCandidate(1.0, a, 1.0, b));
  EXPECT_FALSE(BetterCandidate(1.0, b, 1.0, a));
}

TEST(SolvePureTimeTest, ExpErrorOptimum) {
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const auto out = SolvePureTime(ch, rt);
  ASSERT_TRUE(out.has_value());
  ExpectVerified(ch, rt, *out);
  EXPECT_EQ(out->policy.n, 8);
  EXPECT_EQ(out->policy.hbar, 0.0);
  EXPECT_FALSE(out->policy.requires_csi);
  EXPECT_NEAR(out->policy.power, 0.88237, 1e-4);
  EXPECT_NEAR(out->cost.total, 0.24677, 1e-4);
  EXPECT_NEAR(out->cost.total, CostPureTime(ch, 8, out->policy.power), 1e-15);
}

TEST(SolvePureTimeTest, NoWaitUsesLowerBound) {
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const auto out = SolvePureTime(ch, rt, nullptr, SearchSpace{0, {}});
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->policy.n, 0);
  EXPECT_NEAR(out->policy.power, *MinPower(ch, rt, 0, 0.0), 1e-12);
}

TEST(SolvePureTimeTest, DominatesValidationGrid) {
  const ChannelModel ch = ExpErrorChannel();
  for (double mu : {0.995, 0.999}) {
    const RateTarget rt = RobotArmRates(mu);
    const auto out = SolvePureTime(ch, rt);
    ASSERT_TRUE(out.has_value());
    const int N = MaxHorizon(rt);
    int feasible = 0;
    for (int n = 0; n <= N; ++n) {
      for (int i = 1; i <= 200; ++i) {
        const double p = ch.P_max() * i / 200.0;
        if (Beta(n, EtaConstant(ch, 0.0, p), rt) > mu) continue;
        ++feasible;
        EXPECT_LE(out->cost.total, CostPureTime(ch, n, p) * (1 + 1e-12));
      }
    }
    EXPECT_GT(feasible, 100);
  }
}

TEST(SolvePureTimeTest, CandidateWitness) {
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.999);
  std::vector<SweepPoint> sweep;
  ASSERT_TRUE(SolvePureTime(ch, rt, &sweep).has_value());
  ASSERT_EQ(static_cast<int>(sweep.size()), MaxHorizon(rt) + 1);
  for (const SweepPoint& s : sweep) {
    if (!s.feasible) continue;
    const double p = s.power;
    const bool boundary = std::abs(p - s.lower) < 1e-12 ||
                          std::abs(p - ch.P_max()) < 1e-12;
    if (boundary) continue;
    const double h = 1e-5;
    EXPECT_LT(CostPureTimeDerivative(ch, s.n, p - h), 0.0) << s.n;
    EXPECT_GT(CostPureTimeDerivative(ch, s.n, p + h), 0.0) << s.n;
  }
}

TEST(SolvePureChannelTest, FeasibleOutcomesVerify) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  for (PowerRule rule : {PowerRule::kConstant, PowerRule::kInversion}) {
    std::vector<SweepPoint> sweep;
    const auto out = SolvePureChannel(ch, rt, rule, &sweep);
    ASSERT_TRUE(out.has_value());
    ExpectVerified(ch, rt, *out);
    EXPECT_EQ(out->policy.n, 0);
    EXPECT_EQ(out->policy.rule, rule);
    EXPECT_EQ(sweep.size(), 101u);
    for (const SweepPoint& s : sweep) {
      if (s.feasible) EXPECT_GE(s.cost, out->cost.total);
    }
  }
}

TEST(SolvePureChannelTest, Infeasible) {
  const ChannelModel ch = RayleighQpskChannel(0.0, 1e-4);
  const RateTarget rt = RobotArmRates(0.999);
  EXPECT_FALSE(SolvePureChannel(ch, rt, PowerRule::kConstant).has_value());
  EXPECT_FALSE(SolvePureChannel(ch, rt, PowerRule::kInversion).has_value());
}

TEST(SolveEpsLossTest, ClosedFormPower) {
  const ChannelModel ch =
      SinglePointChannel(2.0, SuccessFunction::ExpError(), 0.0, 100.0);
  const RateTarget rt = RobotArmRates(0.999);
  const double eps = 0.01;
  const auto out = SolveEpsLoss(ch, rt, eps, nullptr, SearchSpace{0, 2.0});
  ASSERT_TRUE(out.has_value());
  EXPECT_NEAR(out->policy.power, -1.0 / (2.0 * std::log(1.0 - eps)), 1e-9);
  ExpectVerified(ch, rt, *out);
}

TEST(SolveEpsLossTest, RangeAndInfeasible) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  EXPECT_THROW(SolveEpsLoss(ch, rt, 0.0), InputError);
  EXPECT_THROW(SolveEpsLoss(ch, rt, 0.5), InputError);
  EXPECT_THROW(SolveEpsLoss(ch, rt, 0.99), InputError);
  const ChannelModel weak = RayleighQpskChannel(0.0, 1e-3);
  EXPECT_FALSE(SolveEpsLoss(weak, rt, 0.01).has_value());
}

TEST(SolveEpsLossTest, OutcomesVerify) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const auto out = SolveEpsLoss(ch, rt, 0.01);
  ASSERT_TRUE(out.has_value());
  ExpectVerified(ch, rt, *out);
  EXPECT_GE(ch.psi()(out->policy.hbar * out->policy.power), 0.99 - 1e-9);
}

TEST(SolveUnsaturatedTest, SinglePointByHand) {
  const ChannelModel ch =
      SinglePointChannel(2.0, SuccessFunction::ExpError(), 0.0, 10.0);
  const RateTarget rt = RobotArmRates(0.999);
  const auto out =
      SolveUnsaturatedInversion(ch, rt, nullptr, SearchSpace{0, 2.0});
  ASSERT_TRUE(out.has_value());
  const double lower = -1.0 / std::log(*RequiredEta(0, rt));
  // n = 0: J = κ/2 is increasing, so κ̲ wins over P_max h̄.
  EXPECT_NEAR(out->policy.power, lower, 1e-8);
  EXPECT_NEAR(out->cost.total, lower / 2.0, 1e-8);
  ExpectVerified(ch, rt, *out);
}

TEST(SolveUnsaturatedTest, StaysUnsaturatedAndVerifies) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  std::vector<SweepPoint> sweep;
  const auto out = SolveUnsaturatedInversion(ch, rt, &sweep);
  ASSERT_TRUE(out.has_value());
  ExpectVerified(ch, rt, *out);
  EXPECT_LE(out->policy.power, ch.P_max() * out->policy.hbar * (1 + 1e-12));
  for (const SweepPoint& s : sweep) {
    if (s.feasible) EXPECT_LE(s.power, ch.P_max() * s.hbar * (1 + 1e-12));
  }
}

TEST(SolveUnsaturatedTest, SensingCostRaisesWait) {
  const RateTarget rt = RobotArmRates(0.999);
  const auto cheap = SolveUnsaturatedInversion(RayleighQpskChannel(0.0), rt);
  const auto dear = SolveUnsaturatedInversion(RayleighQpskChannel(1.0), rt);
  ASSERT_TRUE(cheap && dear);
  EXPECT_GE(dear->policy.n, cheap->policy.n);
  EXPECT_GT(dear->policy.n, 0);
}

TEST(SolveGeneralTest, AgreesWithPureChannel) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  for (PowerRule rule : {PowerRule::kConstant, PowerRule::kInversion}) {
    const auto special = SolvePureChannel(ch, rt, rule);
    double best = std::numeric_limits<double>::infinity();
    for (double hbar : ch.alphabet()) {
      const auto g = SolveGeneral(ch, rt, rule, 64, nullptr, SearchSpace{0, hbar});
      if (g) best = std::min(best, g->cost.total);
    }
    ASSERT_TRUE(special.has_value());
    EXPECT_LE(RelGap(best, special->cost.total), 1e-4);
  }
}

TEST(SolveGeneralTest, AgreesWithPureTime) {
  const ChannelModel ch = ExpErrorChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const auto special = SolvePureTime(ch, rt);
  const auto general = SolveGeneral(ch, rt, PowerRule::kConstant, 64, nullptr,
                                    SearchSpace{{}, 0.0});
  ASSERT_TRUE(special && general);
  EXPECT_LE(std::abs(RelGap(general->cost.total, special->cost.total)), 1e-4);
  EXPECT_EQ(general->policy.n, special->policy.n);
  ExpectVerified(ch, rt, *general);
}

TEST(SolveGeneralTest, DominatesSpecializedModes) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  const auto gc = SolveGeneral(ch, rt, PowerRule::kConstant);
  const auto gi = SolveGeneral(ch, rt, PowerRule::kInversion);
  ASSERT_TRUE(gc && gi);
  ExpectVerified(ch, rt, *gc);
  ExpectVerified(ch, rt, *gi);
  const auto unsat = SolveUnsaturatedInversion(ch, rt);
  const auto pc = SolvePureChannel(ch, rt, PowerRule::kConstant);
  const auto pi = SolvePureChannel(ch, rt, PowerRule::kInversion);
  const auto pt = SolvePureTime(ch, rt);
  ASSERT_TRUE(unsat && pc && pi && pt);
  EXPECT_LE(RelGap(gi->cost.total, unsat->cost.total), 1e-4);
  EXPECT_LE(RelGap(gi->cost.total, pi->cost.total), 1e-4);
  EXPECT_LE(RelGap(gc->cost.total, pc->cost.total), 1e-4);
  EXPECT_LE(RelGap(gc->cost.total, pt->cost.total), 1e-4);
}

TEST(SolveGeneralTest, ResolutionAndInfeasible) {
  const ChannelModel ch = RayleighQpskChannel();
  const RateTarget rt = RobotArmRates(0.999);
  EXPECT_THROW(SolveGeneral(ch, rt, PowerRule::kConstant, 8), InputError);
  const ChannelModel weak = RayleighQpskChannel(0.0, 1e-4);
  EXPECT_FALSE(SolveGeneral(weak, rt, PowerRule::kConstant).has_value());
}

}  // namespace
}  // namespace wncs
