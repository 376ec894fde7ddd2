#pragma once

#include <vector>

#include "sde/contracts.hpp"
#include "sde/distributions.hpp"
#include "sde/locus.hpp"

namespace sde {

using BankBranch = LocusBranch;

/// Borrower-optimal zero-profit bank contract for one type.
struct BankContractSolution {
  double theta = 0.0;
  Contract contract;
  BankBranch branch = BankBranch::unfinanceable;
  double utility = 0.0;
  /// 1 - G(d*|theta).
  double default_prob = 0.0;
  double tangency_residual = 0.0;
  double zero_profit_residual = 0.0;

  bool financed() const noexcept { return branch != BankBranch::unfinanceable; }
};

BankContractSolution solve_bank_contract(const CashFlowFamily& fam, double theta, double lambda_b,
                                         double a_bar, const SolverOptions& opts = {});

/// Type-indexed bank schedule on a uniform grid over the support.
class BankMenu {
 public:
  BankMenu(std::vector<BankContractSolution> solutions, double ir_cutoff);

  const std::vector<BankContractSolution>& solutions() const noexcept { return solutions_; }
  std::vector<double> grid() const;
  /// theta_b: lowest type with non-negative utility under its bank contract.
  double ir_cutoff() const noexcept { return ir_cutoff_; }

  /// Contract at theta by linear interpolation between neighbouring financed
  /// grid nodes (d and m separately).
  Contract interpolate(double theta) const;

 private:
  std::vector<BankContractSolution> solutions_;
  double ir_cutoff_;
};

/// Solves the bank problem on `grid_size` uniform types and locates the IR
/// cutoff by bisection on U_b(theta) = 0 (80 halvings). Throws AllUnfinanceable
/// when no grid type can be financed. If every financed type has negative
/// utility the cutoff is the top of the support (empty financed set).
BankMenu bank_menu(const CashFlowFamily& fam, const TypeDistribution& dist, double lambda_b, double a_bar,
                   std::size_t grid_size = 401, const SolverOptions& opts = {});

/// Locates theta_b on [lo, hi] given U_b(lo) < 0 <= U_b(hi).
double refine_ir_cutoff(const CashFlowFamily& fam, double lo, double hi, double lambda_b, double a_bar,
                        const SolverOptions& opts, int steps = 80);

enum class BankParameter { lambda_b, a_bar };

struct BankResponse {
  BankContractSolution base;
  BankContractSolution perturbed;
  double d_change;
  double m_change;
  double default_prob_change;
  double utility_change;
  /// The perturbation moved the solution to a different branch.
  bool branch_changed;
};

/// Forward finite-difference response of the bank contract to lambda_b or
/// a_bar. Raising lambda_b beyond 1 is rejected with DomainError.
BankResponse bank_comparative_static(const CashFlowFamily& fam, double theta, double lambda_b, double a_bar,
                                     BankParameter param, double delta = 1e-3,
                                     const SolverOptions& opts = {});

}  // namespace sde
