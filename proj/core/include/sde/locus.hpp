#pragma once

#include "sde/contracts.hpp"
#include "sde/distributions.hpp"

namespace sde {

/// First-order condition used to characterize an interior optimum on the
/// zero-profit locus.
///
/// `envelope` is the exact optimality condition d E[g] = (1-lambda) E[G]: the
/// derivative of borrower utility along the locus is [(1-lambda) E[G] - d E[g]] / lambda.
/// `appendix_slope` equates -E[G]/E[1-G] with the locus slope, i.e.
/// E[g] (d - lambda m) = (1-lambda) E[G]; it ignores the -m g term of dU/dd and
/// is kept only as a diagnostic: its contract is not the borrower optimum.
enum class TangencyForm { envelope, appendix_slope };

struct SolverOptions {
  /// Absolute tolerance on the face value for every bracketed search.
  double d_tol = 1e-10;
  /// Acceptance threshold for tangency and zero-profit residuals.
  double residual_tol = 1e-9;
  TangencyForm form = TangencyForm::envelope;
  /// Points in the feasibility scan along the face-value axis.
  int scan_points = 600;
  std::size_t quadrature_order = 64;
};

enum class LocusBranch {
  interior,
  /// m = a_bar; d from zero profit.
  collateral_bound,
  /// m = 0 corner (d E[G] = 1); only reachable when the locus slope is still
  /// positive where the collateral requirement hits zero.
  unsecured,
  /// No (d, m) with 0 <= m <= a_bar breaks even.
  unfinanceable,
};

const char* to_string(LocusBranch b);

struct LocusSolution {
  Contract contract;
  LocusBranch branch = LocusBranch::unfinanceable;
  /// Pool-average borrower utility at the contract (the type's own utility for a point mass).
  double utility = 0.0;
  /// Pool-average default probability E[1-G(d)].
  double default_prob = 0.0;
  double tangency_residual = 0.0;
  double zero_profit_residual = 0.0;
};

/// Maximizes pool-average borrower utility over zero-profit contracts with
/// 0 <= m <= a_bar. With a point-mass averager this is the type-specific
/// (bank) problem.
LocusSolution solve_on_locus(const CashFlowFamily& fam, const PoolAverager& pool, double lambda,
                             double a_bar, const SolverOptions& opts);

}  // namespace sde
