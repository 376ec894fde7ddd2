#include "sde/contracts.hpp"

#include <cmath>

#include "sde/error.hpp"

namespace sde {

FinancierTech::FinancierTech(double lambda, Financier side) : lambda_(lambda), side_(side) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("liquidation efficiency must lie in (0, 1]");
}

void check_contract(const Contract& c) {
  if (!(c.face >= 0.0) || !std::isfinite(c.face)) throw DomainError("contract face value must be finite and >= 0");
  if (!(c.collateral >= 0.0) || !std::isfinite(c.collateral)) {
    throw DomainError("contract collateral must be finite and >= 0");
  }
}

double borrower_utility(const CashFlowFamily& fam, double theta, const Contract& c) {
  check_contract(c);
  return fam.partial_expectation(c.face, theta) - c.collateral * fam.default_prob(c.face, theta);
}

double financier_profit(const CashFlowFamily& fam, double theta, const Contract& c,
                        const FinancierTech& tech) {
  check_contract(c);
  const double surv = fam.survivor(c.face, theta);
  return c.face * surv + tech.lambda() * c.collateral * fam.default_prob(c.face, theta) - 1.0;
}

double social_surplus(const CashFlowFamily& fam, double theta, const Contract& c,
                      const FinancierTech& tech) {
  return fam.mean(theta) - deadweight_loss(fam, theta, c, tech) - 1.0;
}

double private_surplus(const CashFlowFamily& fam, double theta, const Contract& c,
                       const FinancierTech& tech) {
  return borrower_utility(fam, theta, c) + financier_profit(fam, theta, c, tech);
}

double deadweight_loss(const CashFlowFamily& fam, double theta, const Contract& c,
                       const FinancierTech& tech) {
  check_contract(c);
  return (1.0 - tech.lambda()) * c.collateral * fam.default_prob(c.face, theta);
}

double zero_profit_collateral(const CashFlowFamily& fam, double theta, double d,
                              const FinancierTech& tech) {
  const double surv = fam.survivor(d, theta);
  const double q = fam.default_prob(d, theta);
  if (q <= 1e-12) throw NoDefaultRisk("zero-profit collateral undefined: no default risk at this face value");
  const double shortfall = 1.0 - d * surv;
  if (shortfall < 0.0) throw OverRepaid("face value alone over-repays the financier (d G > 1)");
  return shortfall / (tech.lambda() * q);
}

SlopeIdentities slope_identities(const CashFlowFamily& fam, double theta, const Contract& c,
                                 const FinancierTech& tech) {
  check_contract(c);
  const double d = c.face;
  const double m = c.collateral;
  const double surv = fam.survivor(d, theta);
  const double q = fam.default_prob(d, theta);
  const double g = fam.density(d, theta);
  const double lam = tech.lambda();
  return {-surv - m * g, -q, surv - d * g + lam * m * g, lam * q};
}

}  // namespace sde
