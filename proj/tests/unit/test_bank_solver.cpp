#include <cmath>

#include <gtest/gtest.h>

#include "sde/bank_solver.hpp"
#include "sde/error.hpp"
#include "sde/oracle.hpp"

using namespace sde;

namespace {

const CashFlowFamily kExp = CashFlowFamily::exponential();

// Root of d e^{-d/theta} + lambda a (1 - e^{-d/theta}) = 1 by plain bisection on [lo, hi].
double bound_face(double theta, double lambda, double a, double lo, double hi) {
  auto f = [&](double d) { return d * std::exp(-d / theta) + lambda * a * (1.0 - std::exp(-d / theta)) - 1.0; };
  const bool neg_lo = f(lo) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) < 0.0) == neg_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(BankContract, BaselineIsCollateralBound) {
  const BankContractSolution s = solve_bank_contract(kExp, 2.0, 0.9, 2.0);
  ASSERT_EQ(s.branch, BankBranch::collateral_bound);
  EXPECT_EQ(s.contract.collateral, 2.0);
  EXPECT_NEAR(s.contract.face, bound_face(2.0, 0.9, 2.0, 0.0, 1.5), 1e-9);
  EXPECT_NEAR(s.contract.face, 0.677465411, 1e-8);
  EXPECT_LT(s.zero_profit_residual, 1e-9);
  EXPECT_NEAR(s.default_prob, 1.0 - std::exp(-s.contract.face / 2.0), 1e-15);
}

TEST(BankContract, InteriorWhenCollateralIsAmple) {
  // exponential: d g = (1 - lambda) G reduces to d = (1 - lambda) theta
  const BankContractSolution s = solve_bank_contract(kExp, 2.0, 0.9, 20.0);
  ASSERT_EQ(s.branch, BankBranch::interior);
  EXPECT_NEAR(s.contract.face, 0.2, 1e-9);
  const double G = std::exp(-0.1);
  EXPECT_NEAR(s.contract.collateral, (1.0 - 0.2 * G) / (0.9 * (1.0 - G)), 1e-8);
  EXPECT_LT(s.tangency_residual, 1e-9);
  EXPECT_LT(s.zero_profit_residual, 1e-9);
}

TEST(BankContract, AppendixDiagnosticReproducesItsSystem) {
  // d = 1 + (1-lambda) theta (1 - e^{-d/theta}), lambda m = d - (1-lambda) theta
  SolverOptions opts;
  opts.form = TangencyForm::appendix_slope;
  const BankContractSolution s = solve_bank_contract(kExp, 2.0, 0.9, 2.0, opts);
  ASSERT_EQ(s.branch, BankBranch::interior);
  double d = 1.0;
  for (int i = 0; i < 200; ++i) d = 1.0 + 0.2 * (1.0 - std::exp(-d / 2.0));
  EXPECT_NEAR(s.contract.face, d, 1e-9);
  EXPECT_NEAR(s.contract.collateral, (d - 0.2) / 0.9, 1e-9);
  // published five-digit rounding of the same root
  EXPECT_NEAR(s.contract.face, 1.08369, 5e-5);
  EXPECT_NEAR(s.contract.collateral, 0.98188, 5e-5);
  EXPECT_NEAR(s.contract.face, 1.0 + 0.2 * (1.0 - std::exp(-s.contract.face / 2.0)), 1e-9);
  EXPECT_NEAR(0.9 * s.contract.collateral, s.contract.face - 0.2, 1e-9);
  // the diagnostic contract is not the borrower optimum
  EXPECT_LT(s.utility, solve_bank_contract(kExp, 2.0, 0.9, 2.0).utility);
}

TEST(BankContract, NoDeadweightFlatLocus) {
  for (double theta : {1.0, 2.0, 3.0}) {
    // without deadweight the default cash flow still goes to the financier, so
    // the locus is not flat in d; check against the independent grid maximum
    const BankContractSolution s = solve_bank_contract(kExp, theta, 1.0, 50.0);
    ASSERT_TRUE(s.financed());
    EXPECT_LT(s.zero_profit_residual, 1e-9);
    EXPECT_NEAR(s.utility, oracle::grid_best_on_locus(kExp, theta, 1.0, 50.0).utility, 1e-9);
    EXPECT_LE(s.utility, kExp.mean(theta) - 1.0);
  }
}

TEST(BankContract, Unfinanceable) {
  const BankContractSolution s = solve_bank_contract(kExp, 0.2, 0.9, 0.1);
  EXPECT_EQ(s.branch, BankBranch::unfinanceable);
  EXPECT_FALSE(s.financed());
}

TEST(BankContract, ZeroCollateralLimit) {
  // unsecured debt needs max_d d e^{-d/theta} = theta/e >= 1
  EXPECT_FALSE(solve_bank_contract(kExp, 2.0, 0.9, 0.0).financed());
  const BankContractSolution s = solve_bank_contract(kExp, 3.0, 0.9, 0.0);
  ASSERT_TRUE(s.financed());
  EXPECT_EQ(s.contract.collateral, 0.0);
  EXPECT_NEAR(s.contract.face, bound_face(3.0, 0.9, 0.0, 0.0, 3.0), 1e-9);
}

TEST(BankContract, MatchesOracle) {
  for (double theta : {1.1, 1.7, 2.6}) {
    for (double a : {0.5, 2.0, 30.0}) {
      const BankContractSolution s = solve_bank_contract(kExp, theta, 0.8, a);
      if (!s.financed()) {
        EXPECT_THROW(oracle::grid_best_on_locus(kExp, theta, 0.8, a), NoFeasiblePoint) << theta << " " << a;
        continue;
      }
      const oracle::GridOptimum o = oracle::grid_best_on_locus(kExp, theta, 0.8, a);
      EXPECT_NEAR(s.utility, o.utility, 1e-7) << theta << " " << a;
    }
  }
}

TEST(BankContract, InvalidInputs) {
  EXPECT_THROW(solve_bank_contract(kExp, 2.0, 0.0, 2.0), DomainError);
  EXPECT_THROW(solve_bank_contract(kExp, 2.0, 0.9, -1.0), DomainError);
  EXPECT_THROW(solve_bank_contract(kExp, -2.0, 0.9, 1.0), DomainError);
}

TEST(BankMenu, IrCutoffHasZeroUtility) {
  const BankMenu menu = bank_menu(kExp, TypeDistribution::uniform({1.0, 3.0}), 0.9, 2.0);
  EXPECT_EQ(menu.solutions().size(), 401u);
  EXPECT_NEAR(menu.ir_cutoff(), 1.16439537, 1e-8);
  EXPECT_NEAR(solve_bank_contract(kExp, menu.ir_cutoff(), 0.9, 2.0).utility, 0.0, 1e-8);
}

TEST(BankMenu, UtilityAndDefaultMonotone) {
  const BankMenu menu = bank_menu(kExp, TypeDistribution::uniform({1.0, 3.0}), 0.9, 2.0);
  const auto& s = menu.solutions();
  for (std::size_t i = 1; i < s.size(); ++i) {
    EXPECT_GE(s[i].utility, s[i - 1].utility);
    EXPECT_LE(s[i].default_prob, s[i - 1].default_prob);
  }
}

TEST(BankMenu, WholeSupportFinancedWhenLowestTypeGains) {
  const BankMenu menu = bank_menu(kExp, TypeDistribution::uniform({2.0, 3.0}), 0.9, 2.0, 21);
  EXPECT_EQ(menu.ir_cutoff(), 2.0);
}

TEST(BankMenu, InterpolationIsLinearBetweenNodes) {
  const BankMenu menu = bank_menu(kExp, TypeDistribution::uniform({1.0, 3.0}), 0.9, 20.0, 11);
  const auto& s = menu.solutions();
  const Contract mid = menu.interpolate(0.5 * (s[3].theta + s[4].theta));
  EXPECT_NEAR(mid.face, 0.5 * (s[3].contract.face + s[4].contract.face), 1e-14);
}

TEST(BankMenu, AllUnfinanceable) {
  EXPECT_THROW(bank_menu(kExp, TypeDistribution::uniform({0.1, 0.2}), 0.9, 0.1, 11), AllUnfinanceable);
}

TEST(BankMenu, IrCutoffFallsWithLambdaAndCollateral) {
  const TypeDistribution u = TypeDistribution::uniform({1.0, 3.0});
  double prev = 10.0;
  for (double lam : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    const double c = bank_menu(kExp, u, lam, 2.0, 41).ir_cutoff();
    EXPECT_LE(c, prev);
    prev = c;
  }
  prev = 10.0;
  for (double a : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const double c = bank_menu(kExp, u, 0.9, a, 41).ir_cutoff();
    EXPECT_LE(c, prev);
    prev = c;
  }
}

TEST(BankComparativeStatic, CollateralBoundFaceFallsWithCollateral) {
  const BankResponse r = bank_comparative_static(kExp, 2.0, 0.9, 2.0, BankParameter::a_bar);
  EXPECT_LT(r.d_change, 0.0);
  EXPECT_FALSE(r.branch_changed);
}

TEST(BankComparativeStatic, InteriorIgnoresCollateralLimit) {
  const BankResponse r = bank_comparative_static(kExp, 2.0, 0.9, 20.0, BankParameter::a_bar);
  EXPECT_NEAR(r.d_change, 0.0, 1e-9);
  EXPECT_NEAR(r.m_change, 0.0, 1e-9);
}

TEST(BankComparativeStatic, InteriorLambdaResponse) {
  // d = (1 - lambda) theta falls with lambda; so does default
  const BankResponse r = bank_comparative_static(kExp, 2.0, 0.9, 20.0, BankParameter::lambda_b);
  EXPECT_NEAR(r.d_change, -2e-3, 1e-8);
  EXPECT_LT(r.default_prob_change, 0.0);
  EXPECT_GT(r.utility_change, 0.0);
}

TEST(BankComparativeStatic, LambdaCannotExceedOne) {
  EXPECT_THROW(bank_comparative_static(kExp, 2.0, 1.0, 2.0, BankParameter::lambda_b), DomainError);
}

TEST(BankContract, ThinTailUnsecuredWindow) {
  // 1 - G ~ 5e-6 at d = 1: the feasible window below the lower root of d G = 1
  // is far narrower than a scan cell
  const CashFlowFamily ln = CashFlowFamily::lognormal(0.5);
  const BankContractSolution s = solve_bank_contract(ln, 2.2142, 0.7053, 2.0);
  ASSERT_TRUE(s.financed());
  EXPECT_LT(s.contract.face, 1.01);
  EXPECT_NEAR(s.utility, oracle::grid_best_on_locus(ln, 2.2142, 0.7053, 2.0).utility, 1e-9);
}
