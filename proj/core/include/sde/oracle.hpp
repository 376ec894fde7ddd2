#pragma once

#include <functional>
#include <vector>

#include "sde/bank_solver.hpp"
#include "sde/contracts.hpp"
#include "sde/distributions.hpp"
#include "sde/numerics.hpp"

namespace sde::oracle {

struct GridSpec {
  std::size_t d_points = 2000;
  std::size_t m_points = 2000;
  std::size_t theta_points = 200;
  /// Zoom passes around the incumbent best face value; each pass re-grids
  /// two coarse cells with d_points.
  int refinements = 3;

  /// Throws DomainError unless every count is >= 10 and refinements >= 0.
  void validate() const;
};

struct GridOptimum {
  Contract contract;
  double utility = 0.0;
  /// The optimum sits where m = a_bar or m = 0 and d was re-solved for zero profit.
  bool clamped = false;
};

/// Brute-force maximizer of U(theta) over zero-profit contracts with
/// 0 <= m <= a_bar, by enumeration of d. Throws NoFeasiblePoint.
GridOptimum grid_best_on_locus(const CashFlowFamily& fam, double theta, double lambda, double a_bar,
                               const GridSpec& spec = {});

/// Pooled variant: maximizes E_pool[U] with E_pool[Pi] = 0.
GridOptimum grid_best_on_pooled_locus(const CashFlowFamily& fam, const TypeDistribution& dist, PoolInterval pool,
                                      double lambda, double a_bar, const GridSpec& spec = {});

/// Two-dimensional enumeration over (d, m) in [0, d_hi] x [0, a_bar] keeping
/// contracts with non-negative profit. Coarse; for spot checks only.
GridOptimum grid_best_2d(const CashFlowFamily& fam, double theta, double lambda, double a_bar, double d_hi,
                         const GridSpec& spec = {});

/// Every adjacent pair of a uniform `points` grid on [lo, hi] across which fn
/// changes sign (negative vs non-negative). Requires points >= 10.
std::vector<numerics::Bracket> scan_sign_changes(const std::function<double(double)>& fn, double lo, double hi,
                                                 std::size_t points);

/// Midpoint rule with `points` cells. Requires points >= 1000.
double riemann_integral(const std::function<double(double)>& fn, double lo, double hi, std::size_t points);

/// Largest gain max_{theta, theta'} U(theta; c(theta')) - U(theta; c(theta)) over
/// financed types on a theta_points subgrid of the menu.
double menu_mimicry_gain(const CashFlowFamily& fam, const BankMenu& menu, const GridSpec& spec = {});

}  // namespace sde::oracle
