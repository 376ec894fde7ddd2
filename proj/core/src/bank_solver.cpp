#include "sde/bank_solver.hpp"

#include <algorithm>
#include <cmath>

#include "sde/error.hpp"
#include "sde/numerics.hpp"

namespace sde {

BankContractSolution solve_bank_contract(const CashFlowFamily& fam, double theta, double lambda_b,
                                         double a_bar, const SolverOptions& opts) {
  fam.check_type(theta);
  const LocusSolution s = solve_on_locus(fam, PoolAverager::point(theta), lambda_b, a_bar, opts);
  BankContractSolution out;
  out.theta = theta;
  out.contract = s.contract;
  out.branch = s.branch;
  out.utility = s.utility;
  out.default_prob = s.default_prob;
  out.tangency_residual = s.tangency_residual;
  out.zero_profit_residual = s.zero_profit_residual;
  return out;
}

BankMenu::BankMenu(std::vector<BankContractSolution> solutions, double ir_cutoff)
    : solutions_(std::move(solutions)), ir_cutoff_(ir_cutoff) {
  if (solutions_.size() < 2) throw DomainError("BankMenu: need at least two grid nodes");
}

std::vector<double> BankMenu::grid() const {
  std::vector<double> g;
  g.reserve(solutions_.size());
  for (const auto& s : solutions_) g.push_back(s.theta);
  return g;
}

Contract BankMenu::interpolate(double theta) const {
  const auto it = std::lower_bound(solutions_.begin(), solutions_.end(), theta,
                                   [](const BankContractSolution& s, double t) { return s.theta < t; });
  if (it == solutions_.begin()) return it->contract;
  if (it == solutions_.end()) return solutions_.back().contract;
  const BankContractSolution& right = *it;
  const BankContractSolution& left = *(it - 1);
  if (!left.financed()) return right.contract;
  if (!right.financed()) return left.contract;
  const double w = (theta - left.theta) / (right.theta - left.theta);
  return {left.contract.face + w * (right.contract.face - left.contract.face),
          left.contract.collateral + w * (right.contract.collateral - left.contract.collateral)};
}

double refine_ir_cutoff(const CashFlowFamily& fam, double lo, double hi, double lambda_b, double a_bar,
                        const SolverOptions& opts, int steps) {
  auto utility = [&](double t) {
    const BankContractSolution s = solve_bank_contract(fam, t, lambda_b, a_bar, opts);
    return s.financed() ? s.utility : -1.0;
  };
  const numerics::Bracket br = numerics::bisect(utility, lo, hi, 0.0, steps);
  return br.hi;
}

BankMenu bank_menu(const CashFlowFamily& fam, const TypeDistribution& dist, double lambda_b, double a_bar,
                   std::size_t grid_size, const SolverOptions& opts) {
  if (grid_size < 2) throw DomainError("bank_menu: grid_size must be >= 2");
  const TypeSpace& s = dist.support();
  const std::vector<double> grid = numerics::linspace(s.lo(), s.hi(), grid_size);
  std::vector<BankContractSolution> solutions;
  solutions.reserve(grid_size);
  bool any_financed = false;
  for (double theta : grid) {
    solutions.push_back(solve_bank_contract(fam, theta, lambda_b, a_bar, opts));
    any_financed = any_financed || solutions.back().financed();
  }
  if (!any_financed) throw AllUnfinanceable("no grid type can be financed by the bank");

  auto positive = [](const BankContractSolution& sol) { return sol.financed() && sol.utility > 0.0; };
  double cutoff = s.hi();
  if (positive(solutions.front())) {
    cutoff = s.lo();
  } else {
    const auto first = std::find_if(solutions.begin(), solutions.end(), positive);
    if (first != solutions.end()) {
      cutoff = refine_ir_cutoff(fam, (first - 1)->theta, first->theta, lambda_b, a_bar, opts);
    }
  }
  return BankMenu(std::move(solutions), cutoff);
}

BankResponse bank_comparative_static(const CashFlowFamily& fam, double theta, double lambda_b, double a_bar,
                                     BankParameter param, double delta, const SolverOptions& opts) {
  if (!(delta > 0.0)) throw DomainError("perturbation must be > 0");
  double lam2 = lambda_b;
  double a2 = a_bar;
  if (param == BankParameter::lambda_b) {
    lam2 = lambda_b + delta;
    if (lam2 > 1.0) throw DomainError("lambda_b + delta leaves (0, 1]");
  } else {
    a2 = a_bar + delta;
  }
  BankResponse r{solve_bank_contract(fam, theta, lambda_b, a_bar, opts),
                 solve_bank_contract(fam, theta, lam2, a2, opts),
                 0.0, 0.0, 0.0, 0.0, false};
  r.d_change = r.perturbed.contract.face - r.base.contract.face;
  r.m_change = r.perturbed.contract.collateral - r.base.contract.collateral;
  r.default_prob_change = r.perturbed.default_prob - r.base.default_prob;
  r.utility_change = r.perturbed.utility - r.base.utility;
  r.branch_changed = r.perturbed.branch != r.base.branch;
  return r;
}

}  // namespace sde
