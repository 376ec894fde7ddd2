#include "sde/market_solver.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sde/error.hpp"
#include "sde/numerics.hpp"

namespace sde {

MarketContract solve_market_contract(const CashFlowFamily& fam, const TypeDistribution& dist,
                                     PoolInterval pool, double lambda_m, double a_bar,
                                     const SolverOptions& opts) {
  if (!(lambda_m > 0.0 && lambda_m < 1.0)) throw DomainError("market liquidation efficiency must lie in (0, 1)");
  const PoolAverager avg(dist, pool, opts.quadrature_order, PoolAverager::Degenerate::point_mass);
  const LocusSolution s = solve_on_locus(fam, avg, lambda_m, a_bar, opts);
  MarketContract out;
  out.contract = s.contract;
  out.pool = pool;
  out.branch = s.branch;
  out.pool_utility = s.utility;
  out.pool_default_prob = s.default_prob;
  out.pool_tangency_residual = s.tangency_residual;
  out.zero_profit_residual = s.zero_profit_residual;
  return out;
}

namespace {

/// Utility of the lowest pool member when the contract is priced on [v, top].
double marginal_gain(const CashFlowFamily& fam, const TypeDistribution& dist, double v, double lambda_m,
                     double a_bar, const SolverOptions& opts) {
  const MarketContract mc = solve_market_contract(fam, dist, {v, dist.support().hi()}, lambda_m, a_bar, opts);
  if (!mc.feasible()) return -std::numeric_limits<double>::infinity();
  return borrower_utility(fam, v, mc.contract);
}

}  // namespace

MarketOnlyRegime solve_market_only(const CashFlowFamily& fam, const TypeDistribution& dist, double lambda_m,
                                   double a_bar, const SolverOptions& opts, int scan_points) {
  if (scan_points < 2) throw DomainError("scan_points must be >= 2");
  const TypeSpace& s = dist.support();
  auto gain = [&](double v) { return marginal_gain(fam, dist, v, lambda_m, a_bar, opts); };

  MarketOnlyRegime out;
  if (gain(s.lo()) > 0.0) {
    out.participation_cutoff = s.lo();
  } else {
    const std::vector<double> grid = numerics::linspace(s.lo(), s.hi(), static_cast<std::size_t>(scan_points));
    std::vector<numerics::Bracket> crossings;
    double prev = gain(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double cur = gain(grid[i]);
      if (prev <= 0.0 && cur > 0.0) crossings.push_back({grid[i - 1], grid[i]});
      prev = cur;
    }
    if (crossings.empty()) throw MarketUnravels("market-only regime: no participation fixed point");
    out.multiple_fixed_points = crossings.size() > 1;
    auto gain_flip = [&](double v) { return gain(v) > 0.0 ? 1.0 : -1.0; };
    const numerics::Bracket br = numerics::bisect(gain_flip, crossings.front().lo, crossings.front().hi, 0.0, 80);
    out.participation_cutoff = br.hi;
  }
  out.contract = solve_market_contract(fam, dist, {out.participation_cutoff, s.hi()}, lambda_m, a_bar, opts);
  return out;
}

}  // namespace sde
