#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "sde/error.hpp"
#include "sde/oracle.hpp"
#include "sde/welfare.hpp"

using namespace sde;

namespace {

const CashFlowFamily kExp = CashFlowFamily::exponential();
const TypeDistribution kUnif = TypeDistribution::uniform({1.0, 3.0});

double riemann_welfare(const Allocation& a) {
  return oracle::riemann_integral([&](double t) { return pointwise_welfare(a, kExp, t) * kUnif.pdf(t); }, 1.0, 3.0,
                                  100000);
}

std::shared_ptr<const BankMenu> baseline_menu() {
  static const auto m = std::make_shared<const BankMenu>(bank_menu(kExp, kUnif, 0.9, 2.0));
  return m;
}

// Bank below 2.5, market priced on [2.5, 3] above.
Allocation synthetic_split() {
  const MarketContract mc = solve_market_contract(kExp, kUnif, {2.5, 3.0}, 0.85, 2.0);
  return Allocation::coexistence(baseline_menu(), 0.9, mc.contract, 0.85, baseline_menu()->ir_cutoff(), 2.5, 3.0);
}

}  // namespace

TEST(RegimeWelfare, PerfectLiquidationHasNoDeadweight) {
  const auto menu = std::make_shared<const BankMenu>(bank_menu(kExp, kUnif, 1.0, 2.0));
  const Allocation a = allocation_from(*menu, 1.0);
  const WelfareReport w = regime_welfare(a, kExp, kUnif);
  const double lo = menu->ir_cutoff();
  EXPECT_EQ(w.deadweight, 0.0);
  // mu(theta) = theta, density 1/2
  EXPECT_NEAR(w.total, 0.25 * ((3.0 - 1.0) * (3.0 - 1.0) - (lo - 1.0) * (lo - 1.0)), 1e-12);
  EXPECT_NEAR(w.financed_measure, (3.0 - lo) / 2.0, 1e-12);
}

TEST(RegimeWelfare, EmptyIsZero) {
  const WelfareReport w = regime_welfare(Allocation::empty(WelfareRegime::M), kExp, kUnif);
  EXPECT_EQ(w.total, 0.0);
  EXPECT_EQ(w.gross_surplus, 0.0);
  EXPECT_EQ(w.deadweight, 0.0);
  EXPECT_EQ(w.financed_measure, 0.0);
}

TEST(RegimeWelfare, TotalsMatchRiemann) {
  const Allocation b = allocation_from(*baseline_menu(), 0.9);
  const Allocation s = synthetic_split();
  for (const Allocation* a : {&b, &s}) {
    const WelfareReport w = regime_welfare(*a, kExp, kUnif);
    EXPECT_EQ(w.total, w.gross_surplus - w.deadweight);
    EXPECT_GT(w.deadweight, 0.0);
    EXPECT_NEAR(w.total, riemann_welfare(*a), 1e-5);
  }
}

TEST(RegimeWelfare, BaselineRegimes) {
  const EquilibriumConfig cfg;
  const WelfareReport b = regime_welfare(solve_regime(cfg, WelfareRegime::B), kExp, kUnif);
  const WelfareReport m = regime_welfare(solve_regime(cfg, WelfareRegime::M), kExp, kUnif);
  const WelfareReport bm = regime_welfare(solve_regime(cfg, WelfareRegime::BM), kExp, kUnif);
  EXPECT_NEAR(b.total, 0.940696538, 1e-8);
  EXPECT_NEAR(m.total, 0.895017578, 1e-8);
  EXPECT_EQ(bm.total, b.total);
}

TEST(Decompose, IdenticalRegimesGiveZeros) {
  const EquilibriumConfig cfg;
  const Allocation b = solve_regime(cfg, WelfareRegime::B);
  const Allocation bm = solve_regime(cfg, WelfareRegime::BM);
  const Decomposition d =
      decompose(b, regime_welfare(b, kExp, kUnif), bm, regime_welfare(bm, kExp, kUnif), kExp, kUnif);
  EXPECT_EQ(d.liquidation_penalty, 0.0);
  EXPECT_EQ(d.extensive_margin, 0.0);
  EXPECT_EQ(d.screening_relief, 0.0);
  EXPECT_EQ(d.total_diff, 0.0);
}

TEST(Decompose, IdentityAndDirectCheck) {
  const Allocation b = allocation_from(*baseline_menu(), 0.9);
  const Allocation s = synthetic_split();
  const WelfareReport wb = regime_welfare(b, kExp, kUnif);
  const WelfareReport ws = regime_welfare(s, kExp, kUnif);
  const Decomposition d = decompose(b, wb, s, ws, kExp, kUnif);
  EXPECT_NEAR(d.liquidation_penalty + d.screening_relief + d.extensive_margin, d.total_diff, 1e-12);
  EXPECT_EQ(d.extensive_margin, 0.0);
  const double direct = oracle::riemann_integral(
      [&](double t) { return (pointwise_welfare(s, kExp, t) - pointwise_welfare(b, kExp, t)) * kUnif.pdf(t); }, 1.0,
      3.0, 100000);
  EXPECT_NEAR(d.total_diff, direct, 1e-6);
  // same bank contracts below the cutoff: the whole difference is the liquidation term
  EXPECT_NEAR(d.screening_relief, 0.0, 1e-9);
}

TEST(Decompose, ExtensiveMarginSigned) {
  const Allocation b = allocation_from(*baseline_menu(), 0.9);
  const Allocation narrower = Allocation::bank_only(baseline_menu(), 0.9, 2.0, 3.0);
  const Decomposition d = decompose(b, regime_welfare(b, kExp, kUnif), narrower,
                                    regime_welfare(narrower, kExp, kUnif), kExp, kUnif);
  EXPECT_LT(d.extensive_margin, 0.0);
  EXPECT_NEAR(d.extensive_margin, d.total_diff, 1e-12);
}

TEST(BankVsMarket, SlackCollateralFavoursBank) {
  EquilibriumConfig cfg;
  cfg.a_bar = 30.0;
  cfg.lambda_m = 0.85;
  const Allocation b = solve_regime(cfg, WelfareRegime::B);
  const Allocation m = solve_regime(cfg, WelfareRegime::M);
  const BankVsMarket c =
      compare_bank_vs_market(b, regime_welfare(b, kExp, kUnif), m, regime_welfare(m, kExp, kUnif), kExp, kUnif);
  EXPECT_GE(c.difference, 0.0);
}

TEST(BankVsMarket, SufficientConditionIntegralsMatchRiemann) {
  const EquilibriumConfig cfg;
  const Allocation b = solve_regime(cfg, WelfareRegime::B);
  const Allocation m = solve_regime(cfg, WelfareRegime::M);
  const BankVsMarket c =
      compare_bank_vs_market(b, regime_welfare(b, kExp, kUnif), m, regime_welfare(m, kExp, kUnif), kExp, kUnif);
  const double bank_lo = b.financed().front().lo;
  const double market_lo = m.financed().front().lo;
  const double lo = std::min(bank_lo, market_lo);
  const double hi = std::max(bank_lo, market_lo);
  const double sign = market_lo <= bank_lo ? 1.0 : -1.0;
  const double ext = sign * oracle::riemann_integral([](double t) { return (t - 1.0) * 0.5; }, lo, hi, 100000);
  auto dw = [&](const Allocation& a, double t) {
    const auto asg = a.at(t);
    return asg ? (1.0 - asg->lambda) * asg->contract.collateral * kExp.default_prob(asg->contract.face, t) : 0.0;
  };
  const double intensive = oracle::riemann_integral([&](double t) { return (dw(m, t) - dw(b, t)) * 0.5; }, bank_lo,
                                                    3.0, 100000);
  EXPECT_NEAR(c.extensive_gain, ext, 1e-5);
  EXPECT_NEAR(c.intensive_loss, intensive, 1e-5);
  EXPECT_EQ(c.sufficient_condition, c.extensive_gain < c.intensive_loss);
}

TEST(Wedge, Arithmetic) {
  EXPECT_EQ(expected_loss_wedge(0.3, 0.5, 0.02), 0.003);
  EXPECT_EQ(expected_loss_wedge(0.0, 0.7, 0.4), 0.0);
  EXPECT_EQ(expected_loss_wedge(0.3, 0.0, 0.02), 0.0);
  EXPECT_THROW(expected_loss_wedge(1.2, 0.5, 0.02), DomainError);
  EXPECT_THROW(expected_loss_wedge(0.3, -0.5, 0.02), DomainError);
}

TEST(LambdaSensitivity, FixedPartitionBankPositive) {
  const LambdaSensitivity s =
      welfare_lambda_sensitivity(EquilibriumConfig{}, WelfareRegime::B, LambdaTarget::lambda_b, 0.005);
  EXPECT_GT(s.fixed_partition, 0.0);
  EXPECT_GT(s.direct, 0.0);
  EXPECT_NEAR(s.direct + s.reallocation, s.total, 1e-15);
}

TEST(LambdaSensitivity, FixedPartitionMarketPositive) {
  const LambdaSensitivity s =
      welfare_lambda_sensitivity(EquilibriumConfig{}, WelfareRegime::M, LambdaTarget::lambda_m, 0.005);
  EXPECT_GT(s.fixed_partition, 0.0);
}

TEST(LambdaSensitivity, PerfectLiquidationIsFlat) {
  EquilibriumConfig cfg;
  cfg.lambda_b = 1.0;
  const LambdaSensitivity s = welfare_lambda_sensitivity(cfg, WelfareRegime::B, LambdaTarget::lambda_b, 0.005);
  EXPECT_EQ(s.fixed_partition, 0.0);
  EXPECT_EQ(s.total, 0.0);
}
