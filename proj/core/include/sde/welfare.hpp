#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sde/bank_solver.hpp"
#include "sde/equilibrium.hpp"
#include "sde/market_solver.hpp"

namespace sde {

enum class WelfareRegime { B, M, BM };

const char* to_string(WelfareRegime r);

/// Financier and contract assigned to one type.
struct Assignment {
  Financier financier;
  double lambda;
  Contract contract;
};

/// Piecewise assignment of types to financiers. Bank segments read contracts
/// from a menu (linear interpolation); market segments carry one pooled contract.
class Allocation {
 public:
  static Allocation empty(WelfareRegime regime);
  /// Bank finances [lo, hi] off `menu`.
  static Allocation bank_only(std::shared_ptr<const BankMenu> menu, double lambda_b, double lo, double hi);
  /// Market finances [lo, hi] at `contract`.
  static Allocation market_only(const Contract& contract, double lambda_m, double lo, double hi);
  /// Bank on [bank_lo, cutoff], market on (cutoff, hi]. Either side may be empty.
  static Allocation coexistence(std::shared_ptr<const BankMenu> menu, double lambda_b, const Contract& market,
                                double lambda_m, double bank_lo, double cutoff, double hi);

  WelfareRegime regime() const noexcept { return regime_; }
  std::optional<Assignment> at(double theta) const;
  /// Sorted segment ends plus menu nodes inside bank segments.
  std::vector<double> breakpoints() const;
  /// Union of financed segments as (lo, hi) pairs.
  std::vector<PoolInterval> financed() const;

 private:
  struct Segment {
    double lo;
    double hi;
    Financier who;
    double lambda;
    Contract fixed;
  };
  explicit Allocation(WelfareRegime r) : regime_(r) {}

  WelfareRegime regime_;
  std::shared_ptr<const BankMenu> menu_;
  std::vector<Segment> segments_;
};

Allocation allocation_from(const BankMenu& menu, double lambda_b);
Allocation allocation_from(const MarketOnlyRegime& market, double lambda_m, double theta_hi);
Allocation allocation_from(const Equilibrium& eq, double lambda_b, double lambda_m, double theta_hi);

struct WelfareReport {
  WelfareRegime regime = WelfareRegime::B;
  /// Integral of mu - 1 over the financed set.
  double gross_surplus = 0.0;
  /// Integral of (1 - lambda) m q over the financed set.
  double deadweight = 0.0;
  double total = 0.0;
  double financed_measure = 0.0;
  /// Integral of U + Pi (diagnostic).
  double private_surplus = 0.0;
};

/// mu(theta) - 1 - (1 - lambda) m q at theta's assignment, 0 if unfinanced.
double pointwise_welfare(const Allocation& a, const CashFlowFamily& fam, double theta);

WelfareReport regime_welfare(const Allocation& a, const CashFlowFamily& fam, const TypeDistribution& dist,
                             std::size_t order = 64);

struct Decomposition {
  double liquidation_penalty = 0.0;
  double screening_relief = 0.0;
  double extensive_margin = 0.0;
  double total_diff = 0.0;
};

/// W(BM) - W(B) split into the liquidation penalty on H (types the market takes
/// from the bank), the extensive margin (types financed in only one regime) and
/// the screening relief residual.
Decomposition decompose(const Allocation& bank_only, const WelfareReport& w_bank, const Allocation& coexist,
                        const WelfareReport& w_coexist, const CashFlowFamily& fam, const TypeDistribution& dist,
                        std::size_t order = 64);

struct BankVsMarket {
  /// W(B) - W(M).
  double difference = 0.0;
  /// Integral of mu - 1 between the market-only and bank-only participation cutoffs.
  double extensive_gain = 0.0;
  /// Integral over the bank-financed set of the market-minus-bank deadweight.
  double intensive_loss = 0.0;
  /// extensive_gain < intensive_loss.
  bool sufficient_condition = false;
};

BankVsMarket compare_bank_vs_market(const Allocation& bank_only, const WelfareReport& w_bank,
                                    const Allocation& market_only, const WelfareReport& w_market,
                                    const CashFlowFamily& fam, const TypeDistribution& dist, std::size_t order = 64);

/// delta * m * q: expected-loss difference between financiers.
double expected_loss_wedge(double delta, double m, double q);

/// Solves one regime on `cfg`; an unfinanceable regime yields an empty allocation.
Allocation solve_regime(const EquilibriumConfig& cfg, WelfareRegime regime);

enum class LambdaTarget { lambda_b, lambda_m };

struct LambdaSensitivity {
  /// W change with the financed partition frozen and contracts re-solved.
  double fixed_partition = 0.0;
  /// W change with the partition re-solved.
  double total = 0.0;
  /// Equals fixed_partition.
  double direct = 0.0;
  /// total - direct; sign not restricted.
  double reallocation = 0.0;
  bool regime_changed = false;
};

/// Raises the chosen lambda by `step` (capped at 1; a cap at the baseline gives
/// zero change) and reports the welfare response of `regime`.
LambdaSensitivity welfare_lambda_sensitivity(const EquilibriumConfig& cfg, WelfareRegime regime,
                                             LambdaTarget target, double step);

}  // namespace sde
