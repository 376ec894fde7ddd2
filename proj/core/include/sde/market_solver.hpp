#pragma once

#include "sde/contracts.hpp"
#include "sde/distributions.hpp"
#include "sde/locus.hpp"

namespace sde {

using MarketBranch = LocusBranch;

/// Pooled bond contract priced to break even on the pool it attracts.
struct MarketContract {
  Contract contract;
  PoolInterval pool{};
  MarketBranch branch = MarketBranch::unfinanceable;
  /// E_T[U] at the contract.
  double pool_utility = 0.0;
  double pool_default_prob = 0.0;
  double pool_tangency_residual = 0.0;
  double zero_profit_residual = 0.0;

  bool feasible() const noexcept { return branch != MarketBranch::unfinanceable; }
};

/// Maximizes E_T[U] along the pooled zero-profit locus with m <= a_bar. A pool
/// with negligible mass is solved as a point mass. Requires lambda_m in (0, 1).
MarketContract solve_market_contract(const CashFlowFamily& fam, const TypeDistribution& dist,
                                     PoolInterval pool, double lambda_m, double a_bar,
                                     const SolverOptions& opts = {});

struct MarketOnlyRegime {
  /// Lowest participating type.
  double participation_cutoff = 0.0;
  MarketContract contract;
  /// More than one participation fixed point was found; the most inclusive was kept.
  bool multiple_fixed_points = false;
};

/// Participation fixed point of the market-only regime: the cutoff v with
/// U_m(v; contract priced on [v, theta_hi]) = 0. Whole support participates when
/// the lowest type already gains. Throws MarketUnravels if no fixed point exists.
MarketOnlyRegime solve_market_only(const CashFlowFamily& fam, const TypeDistribution& dist, double lambda_m,
                                   double a_bar, const SolverOptions& opts = {}, int scan_points = 40);

}  // namespace sde
