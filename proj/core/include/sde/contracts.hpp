#pragma once

#include "sde/distributions.hpp"

namespace sde {

/// Secured debt contract: face value d due at date 1 and pledged collateral m.
struct Contract {
  double face = 0.0;
  double collateral = 0.0;
};

enum class Financier { bank, market };

/// Liquidation technology of one financier: the share of seized collateral it
/// realizes in default, in (0, 1].
class FinancierTech {
 public:
  FinancierTech(double lambda, Financier side);

  double lambda() const noexcept { return lambda_; }
  Financier side() const noexcept { return side_; }

 private:
  double lambda_;
  Financier side_;
};

/// Validates 0 <= d, 0 <= m (finite).
void check_contract(const Contract& c);

/// U(theta; d, m) = E[(X-d) 1{X>=d}] - m (1 - G(d|theta)). Independent of the financier.
double borrower_utility(const CashFlowFamily& fam, double theta, const Contract& c);

/// Expected profit net of the unit investment: d G + lambda m (1-G) - 1.
double financier_profit(const CashFlowFamily& fam, double theta, const Contract& c,
                        const FinancierTech& tech);

/// W(theta; d, m) = mu(theta) - (1-lambda) m (1-G) - 1.
double social_surplus(const CashFlowFamily& fam, double theta, const Contract& c,
                      const FinancierTech& tech);

/// U + Pi: the surplus split between borrower and financier. Differs from
/// social_surplus by E[X 1{X<d}], the cash flow lost in default.
double private_surplus(const CashFlowFamily& fam, double theta, const Contract& c,
                       const FinancierTech& tech);

/// Expected deadweight loss (1-lambda) m (1-G).
double deadweight_loss(const CashFlowFamily& fam, double theta, const Contract& c,
                       const FinancierTech& tech);

/// Collateral that sets financier_profit to zero at face value d:
/// m(d) = [1 - d G] / [lambda (1 - G)]. May exceed any endowment cap.
/// Throws NoDefaultRisk when G >= 1 - 1e-12 and OverRepaid when d G > 1.
double zero_profit_collateral(const CashFlowFamily& fam, double theta, double d,
                              const FinancierTech& tech);

struct SlopeIdentities {
  double dU_dd;
  double dU_dm;
  double dPi_dd;
  double dPi_dm;
};

/// Partial derivatives of borrower utility and financier profit at (d, m):
/// dU/dd = -G - m g, dU/dm = -(1-G), dPi/dd = G - d g + lambda m g, dPi/dm = lambda (1-G).
SlopeIdentities slope_identities(const CashFlowFamily& fam, double theta, const Contract& c,
                                 const FinancierTech& tech);

}  // namespace sde
