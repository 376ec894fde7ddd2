#include <cmath>

#include <gtest/gtest.h>

#include "sde/bank_solver.hpp"
#include "sde/error.hpp"
#include "sde/oracle.hpp"

using namespace sde;

namespace {
const CashFlowFamily kExp = CashFlowFamily::exponential();
}

TEST(GridSpec, Validation) {
  oracle::GridSpec s;
  s.d_points = 9;
  EXPECT_THROW(s.validate(), DomainError);
  s = {};
  s.refinements = -1;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(GridBest, AgreesWithSolverOnBaseline) {
  const BankContractSolution b = solve_bank_contract(kExp, 2.0, 0.9, 2.0);
  const oracle::GridOptimum o = oracle::grid_best_on_locus(kExp, 2.0, 0.9, 2.0);
  EXPECT_NEAR(o.utility, b.utility, 1e-7);
  EXPECT_TRUE(o.clamped);
  EXPECT_EQ(o.contract.collateral, 2.0);
}

TEST(GridBest, FlatLocusWithoutDeadweight) {
  const BankContractSolution b = solve_bank_contract(kExp, 2.0, 1.0, 50.0);
  const oracle::GridOptimum o = oracle::grid_best_on_locus(kExp, 2.0, 1.0, 50.0);
  EXPECT_NEAR(o.utility, b.utility, 1e-9);
}

TEST(GridBest, UnsecuredBoundary) {
  const oracle::GridOptimum o = oracle::grid_best_on_locus(kExp, 3.0, 0.9, 0.0);
  EXPECT_EQ(o.contract.collateral, 0.0);
  EXPECT_NEAR(o.contract.face * std::exp(-o.contract.face / 3.0), 1.0, 1e-9);
  EXPECT_LT(o.contract.face, 3.0);
  EXPECT_THROW(oracle::grid_best_on_locus(kExp, 0.2, 0.9, 0.0), NoFeasiblePoint);
}

TEST(GridBest, TwoDimensionalSpotCheck) {
  oracle::GridSpec s;
  s.d_points = 400;
  s.m_points = 400;
  const oracle::GridOptimum coarse = oracle::grid_best_2d(kExp, 2.0, 0.9, 2.0, 3.0, s);
  const BankContractSolution b = solve_bank_contract(kExp, 2.0, 0.9, 2.0);
  EXPECT_LE(coarse.utility, b.utility + 1e-12);
  EXPECT_NEAR(coarse.utility, b.utility, 1e-2);
}

TEST(ScanSignChanges, Counts) {
  EXPECT_EQ(oracle::scan_sign_changes([](double x) { return x - 0.3; }, 0.0, 1.0, 50).size(), 1u);
  EXPECT_TRUE(oracle::scan_sign_changes([](double x) { return 1.0 + x * x; }, -1.0, 1.0, 50).empty());
  EXPECT_EQ(oracle::scan_sign_changes([](double x) { return std::sin(x); }, 0.5, 10.0, 200).size(), 3u);
  EXPECT_THROW(oracle::scan_sign_changes([](double x) { return x; }, 0.0, 1.0, 9), DomainError);
}

TEST(Riemann, Polynomial) {
  EXPECT_NEAR(oracle::riemann_integral([](double x) { return x; }, 0.0, 1.0, 100000), 0.5, 1e-9);
  EXPECT_THROW(oracle::riemann_integral([](double x) { return x; }, 0.0, 1.0, 999), DomainError);
}

TEST(MenuMimicry, Reported) {
  const BankMenu menu = bank_menu(kExp, TypeDistribution::uniform({1.0, 3.0}), 0.9, 2.0, 41);
  const double gain = oracle::menu_mimicry_gain(kExp, menu);
  EXPECT_TRUE(std::isfinite(gain));
  EXPECT_GE(gain, 0.0);
}
