#include "sde/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sde/error.hpp"
#include "sde/numerics.hpp"

namespace sde {

const char* to_string(WelfareRegime r) {
  switch (r) {
    case WelfareRegime::B: return "B";
    case WelfareRegime::M: return "M";
    case WelfareRegime::BM: return "BM";
  }
  return "unknown";
}

Allocation Allocation::empty(WelfareRegime regime) { return Allocation(regime); }

Allocation Allocation::bank_only(std::shared_ptr<const BankMenu> menu, double lambda_b, double lo, double hi) {
  Allocation a(WelfareRegime::B);
  if (hi > lo) {
    if (!menu) throw DomainError("bank segment needs a menu");
    a.menu_ = std::move(menu);
    a.segments_.push_back({lo, hi, Financier::bank, lambda_b, {}});
  }
  return a;
}

Allocation Allocation::market_only(const Contract& contract, double lambda_m, double lo, double hi) {
  Allocation a(WelfareRegime::M);
  if (hi > lo) a.segments_.push_back({lo, hi, Financier::market, lambda_m, contract});
  return a;
}

Allocation Allocation::coexistence(std::shared_ptr<const BankMenu> menu, double lambda_b, const Contract& market,
                                   double lambda_m, double bank_lo, double cutoff, double hi) {
  Allocation a(WelfareRegime::BM);
  if (cutoff > bank_lo) {
    if (!menu) throw DomainError("bank segment needs a menu");
    a.menu_ = std::move(menu);
    a.segments_.push_back({bank_lo, cutoff, Financier::bank, lambda_b, {}});
  }
  if (hi > cutoff) a.segments_.push_back({cutoff, hi, Financier::market, lambda_m, market});
  return a;
}

std::optional<Assignment> Allocation::at(double theta) const {
  for (const Segment& s : segments_) {
    if (theta < s.lo || theta > s.hi) continue;
    const Contract c = s.who == Financier::bank ? menu_->interpolate(theta) : s.fixed;
    return Assignment{s.who, s.lambda, c};
  }
  return std::nullopt;
}

std::vector<double> Allocation::breakpoints() const {
  std::vector<double> out;
  for (const Segment& s : segments_) {
    out.push_back(s.lo);
    out.push_back(s.hi);
    if (s.who != Financier::bank) continue;
    for (const double x : menu_->grid()) {
      if (x > s.lo && x < s.hi) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PoolInterval> Allocation::financed() const {
  std::vector<PoolInterval> out;
  for (const Segment& s : segments_) {
    if (!out.empty() && out.back().hi >= s.lo) {
      out.back().hi = std::max(out.back().hi, s.hi);
    } else {
      out.push_back({s.lo, s.hi});
    }
  }
  return out;
}

Allocation allocation_from(const BankMenu& menu, double lambda_b) {
  const double hi = menu.solutions().back().theta;
  return Allocation::bank_only(std::make_shared<const BankMenu>(menu), lambda_b, menu.ir_cutoff(), hi);
}

Allocation allocation_from(const MarketOnlyRegime& market, double lambda_m, double theta_hi) {
  if (!market.contract.feasible()) return Allocation::empty(WelfareRegime::M);
  return Allocation::market_only(market.contract.contract, lambda_m, market.participation_cutoff, theta_hi);
}

Allocation allocation_from(const Equilibrium& eq, double lambda_b, double lambda_m, double theta_hi) {
  if (eq.regime == Regime::no_finance) return Allocation::empty(WelfareRegime::BM);
  std::shared_ptr<const BankMenu> menu;
  if (eq.bank_menu) menu = std::make_shared<const BankMenu>(*eq.bank_menu);
  const double cutoff = eq.star_cutoff;
  const Contract market = eq.market.feasible() ? eq.market.contract : Contract{};
  const double market_hi = eq.market.feasible() ? theta_hi : cutoff;
  return Allocation::coexistence(menu, lambda_b, market, lambda_m, eq.ir_cutoff, cutoff, market_hi);
}

namespace {

double deadweight_at(const CashFlowFamily& fam, double theta, const Assignment& a) {
  return (1.0 - a.lambda) * a.contract.collateral * fam.default_prob(a.contract.face, theta);
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

/// Gauss-Legendre per cell of `breaks`, integrand weighted by the type density.
template <class F>
double integrate_cells(const numerics::GaussLegendre& gl, const std::vector<double>& breaks,
                       const TypeDistribution& dist, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) continue;
    acc += gl.integrate([&](double t) { return f(t) * dist.pdf(t); }, breaks[i - 1], breaks[i]);
  }
  return acc;
}

}  // namespace

double pointwise_welfare(const Allocation& a, const CashFlowFamily& fam, double theta) {
  const std::optional<Assignment> asg = a.at(theta);
  if (!asg) return 0.0;
  return fam.mean(theta) - 1.0 - deadweight_at(fam, theta, *asg);
}

WelfareReport regime_welfare(const Allocation& a, const CashFlowFamily& fam, const TypeDistribution& dist,
                             std::size_t order) {
  WelfareReport r;
  r.regime = a.regime();
  const std::vector<double> breaks = a.breakpoints();
  if (breaks.size() < 2) return r;
  const numerics::GaussLegendre gl(order);
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double lo = breaks[i - 1];
    const double hi = breaks[i];
    if (!(hi > lo)) continue;
    const std::optional<Assignment> mid = a.at(0.5 * (lo + hi));
    if (!mid) continue;
    const double half = 0.5 * (hi - lo);
    const double centre = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < gl.order(); ++k) {
      const double t = centre + half * gl.nodes()[k];
      const double w = half * gl.weights()[k] * dist.pdf(t);
      const Assignment asg = *a.at(t);
      const FinancierTech tech(asg.lambda, asg.financier);
      r.gross_surplus += w * (fam.mean(t) - 1.0);
      r.deadweight += w * deadweight_at(fam, t, asg);
      r.financed_measure += w;
      r.private_surplus += w * private_surplus(fam, t, asg.contract, tech);
    }
  }
  r.total = r.gross_surplus - r.deadweight;
  r.financed_measure = std::clamp(r.financed_measure, 0.0, 1.0);
  return r;
}

Decomposition decompose(const Allocation& bank_only, const WelfareReport& w_bank, const Allocation& coexist,
                        const WelfareReport& w_coexist, const CashFlowFamily& fam, const TypeDistribution& dist,
                        std::size_t order) {
  const numerics::GaussLegendre gl(order);
  const std::vector<double> breaks = merged(bank_only.breakpoints(), coexist.breakpoints());
  Decomposition out;
  out.liquidation_penalty = integrate_cells(gl, breaks, dist, [&](double t) {
    const std::optional<Assignment> b = bank_only.at(t);
    const std::optional<Assignment> c = coexist.at(t);
    if (!b || !c || b->financier != Financier::bank || c->financier != Financier::market) return 0.0;
    return deadweight_at(fam, t, *b) - deadweight_at(fam, t, *c);
  });
  out.extensive_margin = integrate_cells(gl, breaks, dist, [&](double t) {
    const bool in_b = bank_only.at(t).has_value();
    const bool in_c = coexist.at(t).has_value();
    if (in_b == in_c) return 0.0;
    return in_c ? pointwise_welfare(coexist, fam, t) : -pointwise_welfare(bank_only, fam, t);
  });
  out.total_diff = w_coexist.total - w_bank.total;
  out.screening_relief = out.total_diff - out.liquidation_penalty - out.extensive_margin;
  return out;
}

BankVsMarket compare_bank_vs_market(const Allocation& bank_only, const WelfareReport& w_bank,
                                    const Allocation& market_only, const WelfareReport& w_market,
                                    const CashFlowFamily& fam, const TypeDistribution& dist, std::size_t order) {
  const numerics::GaussLegendre gl(order);
  const double top = dist.support().hi();
  const std::vector<PoolInterval> fb = bank_only.financed();
  const std::vector<PoolInterval> fm = market_only.financed();
  const double bank_lo = fb.empty() ? top : fb.front().lo;
  const double market_lo = fm.empty() ? top : fm.front().lo;

  BankVsMarket out;
  out.difference = w_bank.total - w_market.total;
  const double lo = std::min(market_lo, bank_lo);
  const double hi = std::max(market_lo, bank_lo);
  const double sign = market_lo <= bank_lo ? 1.0 : -1.0;
  out.extensive_gain =
      sign * integrate_cells(gl, numerics::linspace(lo, hi, 9), dist, [&](double t) { return fam.mean(t) - 1.0; });

  std::vector<double> breaks = merged(bank_only.breakpoints(), market_only.breakpoints());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return x < bank_lo; }), breaks.end());
  out.intensive_loss = integrate_cells(gl, breaks, dist, [&](double t) {
    const std::optional<Assignment> m = market_only.at(t);
    const std::optional<Assignment> b = bank_only.at(t);
    return (m ? deadweight_at(fam, t, *m) : 0.0) - (b ? deadweight_at(fam, t, *b) : 0.0);
  });
  out.sufficient_condition = out.extensive_gain < out.intensive_loss;
  return out;
}

double expected_loss_wedge(double delta, double m, double q) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("wedge: delta must lie in [0, 1]");
  if (!(m >= 0.0)) throw DomainError("wedge: collateral must be >= 0");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("wedge: default probability must lie in [0, 1]");
  return delta * m * q;
}

namespace {

/// Solved objects behind an allocation, kept so contracts can be re-priced on
/// a frozen partition.
struct RegimeParts {
  WelfareRegime regime = WelfareRegime::B;
  Regime label = Regime::no_finance;
  std::shared_ptr<const BankMenu> menu;
  double bank_lo = 0.0;
  double cutoff = 0.0;
  double hi = 0.0;
  Contract market{};
  bool market_active = false;

  Allocation allocation(double lambda_b, double lambda_m) const {
    switch (regime) {
      case WelfareRegime::B:
        if (label == Regime::no_finance) return Allocation::empty(regime);
        return Allocation::bank_only(menu, lambda_b, bank_lo, hi);
      case WelfareRegime::M:
        if (label == Regime::no_finance) return Allocation::empty(regime);
        return Allocation::market_only(market, lambda_m, cutoff, hi);
      case WelfareRegime::BM:
        if (label == Regime::no_finance) return Allocation::empty(regime);
        return Allocation::coexistence(menu, lambda_b, market, lambda_m, bank_lo, cutoff,
                                       market_active ? hi : cutoff);
    }
    return Allocation::empty(regime);
  }
};

RegimeParts solve_parts(const EquilibriumConfig& cfg, WelfareRegime regime) {
  cfg.validate();
  RegimeParts p;
  p.regime = regime;
  p.hi = cfg.types.support().hi();
  switch (regime) {
    case WelfareRegime::B:
      try {
        p.menu = std::make_shared<const BankMenu>(
            bank_menu(cfg.family, cfg.types, cfg.lambda_b, cfg.a_bar, cfg.bank_grid, cfg.solver));
        p.bank_lo = p.menu->ir_cutoff();
        p.cutoff = p.hi;
        p.label = p.bank_lo < p.hi ? Regime::all_bank : Regime::no_finance;
      } catch (const AllUnfinanceable&) {
      }
      break;
    case WelfareRegime::M:
      try {
        const MarketOnlyRegime mo = solve_market_only(cfg.family, cfg.types, cfg.lambda_m, cfg.a_bar, cfg.solver);
        if (mo.contract.feasible() && mo.participation_cutoff < p.hi) {
          p.label = Regime::all_market;
          p.cutoff = mo.participation_cutoff;
          p.bank_lo = p.cutoff;
          p.market = mo.contract.contract;
          p.market_active = true;
        }
      } catch (const MarketUnravels&) {
      }
      break;
    case WelfareRegime::BM: {
      const Equilibrium eq = solve_equilibrium(cfg);
      p.label = eq.regime;
      if (eq.bank_menu) p.menu = std::make_shared<const BankMenu>(*eq.bank_menu);
      p.bank_lo = eq.ir_cutoff;
      p.cutoff = eq.star_cutoff;
      p.market = eq.market.contract;
      p.market_active = eq.market.feasible() && eq.star_cutoff < p.hi;
      break;
    }
  }
  return p;
}

}  // namespace

Allocation solve_regime(const EquilibriumConfig& cfg, WelfareRegime regime) {
  return solve_parts(cfg, regime).allocation(cfg.lambda_b, cfg.lambda_m);
}

LambdaSensitivity welfare_lambda_sensitivity(const EquilibriumConfig& cfg, WelfareRegime regime,
                                             LambdaTarget target, double step) {
  if (!(step > 0.0)) throw DomainError("sensitivity step must be positive");
  LambdaSensitivity out;
  EquilibriumConfig moved = cfg;
  double& lam = target == LambdaTarget::lambda_b ? moved.lambda_b : moved.lambda_m;
  lam = std::min(lam + step, 1.0);
  if (lam == (target == LambdaTarget::lambda_b ? cfg.lambda_b : cfg.lambda_m)) return out;

  const RegimeParts base = solve_parts(cfg, regime);
  const std::size_t order = cfg.solver.quadrature_order;
  const double w0 = regime_welfare(base.allocation(cfg.lambda_b, cfg.lambda_m), cfg.family, cfg.types, order).total;

  if (base.label != Regime::no_finance) {
    RegimeParts frozen = base;
    const bool bank_side = regime != WelfareRegime::M && frozen.menu;
    const bool market_side = regime != WelfareRegime::B && frozen.market_active;
    if (target == LambdaTarget::lambda_b && bank_side) {
      frozen.menu = std::make_shared<const BankMenu>(
          bank_menu(cfg.family, cfg.types, moved.lambda_b, cfg.a_bar, cfg.bank_grid, cfg.solver));
    }
    if (target == LambdaTarget::lambda_m && market_side) {
      const MarketContract mc =
          solve_market_contract(cfg.family, cfg.types, {frozen.cutoff, frozen.hi}, moved.lambda_m, cfg.a_bar, cfg.solver);
      if (mc.feasible()) frozen.market = mc.contract;
    }
    const Allocation a = frozen.allocation(moved.lambda_b, moved.lambda_m);
    out.fixed_partition = regime_welfare(a, cfg.family, cfg.types, order).total - w0;
  }

  const RegimeParts resolved = solve_parts(moved, regime);
  const double w1 =
      regime_welfare(resolved.allocation(moved.lambda_b, moved.lambda_m), cfg.family, cfg.types, order).total;
  out.total = w1 - w0;
  out.direct = out.fixed_partition;
  out.reallocation = out.total - out.direct;
  out.regime_changed = resolved.label != base.label;
  return out;
}

}  // namespace sde
