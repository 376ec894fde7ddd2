#include "sde/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sde/error.hpp"
#include "sde/numerics.hpp"

namespace sde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Largest |U_b - U_m| at a bisected Gamma root still read as a fixed point
/// rather than a jump of the cutoff map.
constexpr double kAcceptResidual = 1e-6;

double cutoff_tol(double theta) { return 1e-12 * std::max(1.0, std::abs(theta)); }

}  // namespace

void EquilibriumConfig::validate() const {
  if (!(lambda_b > 0.0 && lambda_b <= 1.0)) throw DomainError("bank liquidation efficiency must lie in (0, 1]");
  if (!(lambda_m > 0.0 && lambda_m < 1.0)) throw DomainError("market liquidation efficiency must lie in (0, 1)");
  if (allow_zero_gap ? lambda_m > lambda_b : lambda_m >= lambda_b) {
    throw DomainError("bank liquidation efficiency must exceed the market's");
  }
  if (!(a_bar >= 0.0) || !std::isfinite(a_bar)) throw DomainError("collateral limit must be finite and >= 0");
  if (bank_grid < 2) throw DomainError("bank grid needs at least 2 points");
  if (max_bisection < 1) throw DomainError("max_bisection must be positive");
  if (gamma_scan_points < 2) throw DomainError("gamma_scan_points must be >= 2");
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::coexistence: return "coexistence";
    case Regime::all_bank: return "all_bank";
    case Regime::all_market: return "all_market";
    case Regime::no_finance: return "no_finance";
  }
  return "unknown";
}

SelectionProblem::SelectionProblem(EquilibriumConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const TypeSpace& s = cfg_.types.support();
  ir_cutoff_ = s.hi();
  try {
    menu_.emplace(sde::bank_menu(cfg_.family, cfg_.types, cfg_.lambda_b, cfg_.a_bar, cfg_.bank_grid, cfg_.solver));
    ir_cutoff_ = menu_->ir_cutoff();
  } catch (const AllUnfinanceable&) {
    menu_.reset();
  }
}

BankContractSolution SelectionProblem::bank_solution(double theta) const {
  return solve_bank_contract(cfg_.family, theta, cfg_.lambda_b, cfg_.a_bar, cfg_.solver);
}

MarketContract SelectionProblem::market_for(double vartheta) const {
  return solve_market_contract(cfg_.family, cfg_.types, {vartheta, top()}, cfg_.lambda_m, cfg_.a_bar, cfg_.solver);
}

double SelectionProblem::utility_gap(double theta, const MarketContract& market) const {
  if (!market.feasible()) return kInf;
  const BankContractSolution b = bank_solution(theta);
  if (!b.financed()) return -kInf;
  return b.utility - borrower_utility(cfg_.family, theta, market.contract);
}

double SelectionProblem::utility_gap(double theta, double vartheta) const {
  return utility_gap(theta, market_for(vartheta));
}

InnerCutoff SelectionProblem::inner_cutoff(double vartheta) const {
  const MarketContract market = market_for(vartheta);
  auto phi = [&](double t) { return utility_gap(t, market); };
  InnerCutoff out;
  out.phi_at_ir = phi(ir_cutoff_);
  out.phi_at_top = phi(top());
  if (out.phi_at_ir >= 0.0 && out.phi_at_top < 0.0) {
    const numerics::Bracket br =
        numerics::bisect(phi, ir_cutoff_, top(), cutoff_tol(top()), cfg_.max_bisection);
    out.cutoff = 0.5 * (br.lo + br.hi);
  }
  return out;
}

double SelectionProblem::cutoff_map(double vartheta) const {
  const InnerCutoff ic = inner_cutoff(vartheta);
  if (ic.cutoff) return *ic.cutoff;
  return ic.phi_at_ir < 0.0 ? ir_cutoff_ : top();
}

double SelectionProblem::gamma(double vartheta) const { return cutoff_map(vartheta) - vartheta; }

double utility_gap(const EquilibriumConfig& cfg, double theta, double vartheta) {
  return SelectionProblem(cfg).utility_gap(theta, vartheta);
}

InnerCutoff inner_cutoff(const EquilibriumConfig& cfg, double vartheta) {
  return SelectionProblem(cfg).inner_cutoff(vartheta);
}

namespace {

bool bank_serves_nobody(const SelectionProblem& p) {
  if (!p.bank_menu()) return true;
  if (p.ir_cutoff() < p.top()) return false;
  const BankContractSolution b = p.bank_solution(p.top());
  return !b.financed() || b.utility < 0.0;
}

Equilibrium market_only_fallback(const SelectionProblem& p) {
  const EquilibriumConfig& c = p.config();
  Equilibrium eq;
  eq.bank_menu = p.bank_menu();
  try {
    const MarketOnlyRegime mo = solve_market_only(c.family, c.types, c.lambda_m, c.a_bar, c.solver);
    eq.regime = Regime::all_market;
    eq.ir_cutoff = mo.participation_cutoff;
    eq.star_cutoff = mo.participation_cutoff;
    eq.market = mo.contract;
  } catch (const MarketUnravels&) {
    eq.regime = Regime::no_finance;
    eq.ir_cutoff = p.top();
    eq.star_cutoff = p.top();
  }
  return eq;
}

}  // namespace

Equilibrium solve_equilibrium(const SelectionProblem& p) {
  if (bank_serves_nobody(p)) return market_only_fallback(p);

  const double lo = p.ir_cutoff();
  const double hi = p.top();
  Equilibrium eq;
  eq.ir_cutoff = lo;
  eq.bank_menu = p.bank_menu();
  {
    const MarketContract widest = p.market_for(lo);
    const MarketContract point = p.market_for(hi);
    eq.diagnostics.at_ir_widest_pool = p.utility_gap(lo, widest);
    eq.diagnostics.at_top_widest_pool = p.utility_gap(hi, widest);
    eq.diagnostics.at_top_point_pool = p.utility_gap(hi, point);
  }

  if (!(hi > lo)) {
    eq.regime = Regime::all_bank;
    eq.star_cutoff = hi;
    eq.market = p.market_for(hi);
    return eq;
  }

  const std::vector<double> grid =
      numerics::linspace(lo, hi, static_cast<std::size_t>(p.config().gamma_scan_points));
  std::vector<double> gam(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gam[i] = p.gamma(grid[i]);

  const double tol = cutoff_tol(hi);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(gam[i - 1] > 0.0 && gam[i] < 0.0)) continue;
    double a = grid[i - 1];
    double b = grid[i];
    int steps = 0;
    while (b - a > tol) {
      if (steps == p.config().max_bisection) throw NoConvergence("equilibrium cutoff bisection did not converge");
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (p.gamma(mid) < 0.0 ? b : a) = mid;
      ++steps;
    }
    const double cutoff = 0.5 * (a + b);
    const MarketContract market = p.market_for(cutoff);
    const double residual = std::abs(p.utility_gap(cutoff, market));
    if (!(residual <= kAcceptResidual)) {
      // Gamma jumps here (the inner cutoff switched corners); not a fixed point.
      ++eq.rejected_brackets;
      continue;
    }
    eq.regime = Regime::coexistence;
    eq.star_cutoff = cutoff;
    eq.bisection_steps = steps;
    eq.market = market;
    eq.indifference_residual = residual;
    return eq;
  }

  if (gam.front() == 0.0 && std::all_of(gam.begin() + 1, gam.end(), [](double v) { return v <= 0.0; })) {
    eq.regime = Regime::all_market;
    eq.star_cutoff = lo;
  } else if (eq.diagnostics.at_top_point_pool >= 0.0) {
    // The top type keeps the bank even against a market priced on itself alone.
    eq.regime = Regime::all_bank;
    eq.star_cutoff = hi;
  } else {
    throw NoConvergence("no fixed point of the cutoff map");
  }
  eq.market = p.market_for(eq.star_cutoff);
  return eq;
}

Equilibrium solve_equilibrium(const EquilibriumConfig& cfg) { return solve_equilibrium(SelectionProblem(cfg)); }

CutoffResponse cutoff_comparative_statics(const EquilibriumConfig& cfg, CutoffParameter param, double step,
                                          bool move_lambda_b) {
  if (!(step > 0.0)) throw DomainError("comparative-static step must be positive");
  EquilibriumConfig moved = cfg;
  switch (param) {
    case CutoffParameter::gap:
      if (move_lambda_b) {
        moved.lambda_b += step;
      } else {
        moved.lambda_m -= step;
      }
      break;
    case CutoffParameter::a_bar:
      moved.a_bar += step;
      break;
  }
  CutoffResponse out{solve_equilibrium(cfg), solve_equilibrium(moved), 0.0, false};
  out.difference = out.perturbed.star_cutoff - out.base.star_cutoff;
  out.regime_changed = out.base.regime != out.perturbed.regime;
  return out;
}

}  // namespace sde
