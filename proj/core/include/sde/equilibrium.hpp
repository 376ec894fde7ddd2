#pragma once

#include <optional>

#include "sde/bank_solver.hpp"
#include "sde/market_solver.hpp"

namespace sde {

struct EquilibriumConfig {
  CashFlowFamily family = CashFlowFamily::exponential();
  TypeDistribution types = TypeDistribution::uniform({1.0, 3.0});
  double lambda_b = 0.9;
  double lambda_m = 0.85;
  double a_bar = 2.0;
  SolverOptions solver{};
  std::size_t bank_grid = 401;
  int max_bisection = 200;
  /// Points in the coarse scan of Gamma used to bracket the fixed point.
  int gamma_scan_points = 24;
  /// Permits lambda_m == lambda_b (zero-gap diagnostics only).
  bool allow_zero_gap = false;

  /// Liquidation gap lambda_b - lambda_m.
  double gap() const noexcept { return lambda_b - lambda_m; }
  /// Throws DomainError unless 0 < lambda_m < lambda_b <= 1 and a_bar >= 0.
  void validate() const;
};

enum class Regime { coexistence, all_bank, all_market, no_finance };

const char* to_string(Regime r);

struct InnerCutoff {
  /// Type indifferent between its bank contract and the market contract;
  /// empty when Phi does not change sign on [theta_b, theta_hi].
  std::optional<double> cutoff;
  double phi_at_ir = 0.0;
  double phi_at_top = 0.0;
};

/// Bank menu plus the per-conjecture market problem. Built once per
/// configuration and queried by the fixed-point search.
class SelectionProblem {
 public:
  explicit SelectionProblem(EquilibriumConfig cfg);

  const EquilibriumConfig& config() const noexcept { return cfg_; }
  /// Empty when the bank cannot finance any grid type.
  const std::optional<BankMenu>& bank_menu() const noexcept { return menu_; }
  double ir_cutoff() const noexcept { return ir_cutoff_; }
  double top() const noexcept { return cfg_.types.support().hi(); }

  BankContractSolution bank_solution(double theta) const;
  /// Contract priced on the conjectured pool [vartheta, theta_hi].
  MarketContract market_for(double vartheta) const;

  /// Phi(theta; vartheta) = U_b(theta) - U_m(theta; contract priced on [vartheta, theta_hi]).
  /// +inf when the market contract is infeasible, otherwise -inf when the bank
  /// cannot finance theta.
  double utility_gap(double theta, const MarketContract& market) const;
  double utility_gap(double theta, double vartheta) const;

  /// Root of Phi(.; vartheta) on [theta_b, theta_hi], bank preferred below it.
  InnerCutoff inner_cutoff(double vartheta) const;
  /// Clamped inner cutoff: theta_b when the market is preferred throughout,
  /// theta_hi when the bank is preferred throughout.
  double cutoff_map(double vartheta) const;
  /// Gamma(vartheta) = cutoff_map(vartheta) - vartheta.
  double gamma(double vartheta) const;

 private:
  EquilibriumConfig cfg_;
  std::optional<BankMenu> menu_;
  double ir_cutoff_ = 0.0;
};

struct PhiDiagnostics {
  /// Phi(theta_b; theta_b): marginal bank type facing the widest market pool.
  double at_ir_widest_pool = 0.0;
  /// Phi(theta_hi; theta_b).
  double at_top_widest_pool = 0.0;
  /// Phi(theta_hi; theta_hi): top type facing its own point-mass market price.
  double at_top_point_pool = 0.0;
};

struct Equilibrium {
  Regime regime = Regime::no_finance;
  double ir_cutoff = 0.0;
  double star_cutoff = 0.0;
  /// Full-support bank menu; the bank serves [ir_cutoff, star_cutoff).
  std::optional<BankMenu> bank_menu;
  /// Market contract priced on [star_cutoff, theta_hi] (a point mass in all_bank).
  MarketContract market;
  PhiDiagnostics diagnostics;
  /// |U_b(theta*) - U_m(theta*)|; zero outside coexistence.
  double indifference_residual = 0.0;
  int bisection_steps = 0;
  /// Sign changes of Gamma that turned out to be jumps rather than roots.
  int rejected_brackets = 0;
};

double utility_gap(const EquilibriumConfig& cfg, double theta, double vartheta);
InnerCutoff inner_cutoff(const EquilibriumConfig& cfg, double vartheta);

/// Bank-market equilibrium with monotone selection. Brackets sign changes of
/// Gamma with a coarse scan and bisects them; a bracket whose limit point is not
/// indifferent is a jump and is skipped. Without an interior root the corners
/// are classified from the endpoint values; NoConvergence if neither corner is
/// a fixed point. Ties at the cutoff go to the bank.
Equilibrium solve_equilibrium(const EquilibriumConfig& cfg);
Equilibrium solve_equilibrium(const SelectionProblem& problem);

enum class CutoffParameter { gap, a_bar };

struct CutoffResponse {
  Equilibrium base;
  Equilibrium perturbed;
  double difference = 0.0;
  bool regime_changed = false;
};

/// theta*(perturbed) - theta*(base). The gap is widened by lowering lambda_m
/// by `step` (or raising lambda_b when `move_lambda_b`).
CutoffResponse cutoff_comparative_statics(const EquilibriumConfig& cfg, CutoffParameter param, double step,
                                          bool move_lambda_b = false);

}  // namespace sde
