#include "sde/locus.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sde/error.hpp"
#include "sde/numerics.hpp"

namespace sde {

const char* to_string(LocusBranch b) {
  switch (b) {
    case LocusBranch::interior:
      return "interior";
    case LocusBranch::collateral_bound:
      return "collateral_bound";
    case LocusBranch::unsecured:
      return "unsecured";
    case LocusBranch::unfinanceable:
      return "unfinanceable";
  }
  return "unknown";
}

namespace {

struct Moments {
  double surv = 0.0;     // E[G]
  double q = 0.0;        // E[1-G]
  double dens = 0.0;     // E[g]
  double partial = 0.0;  // E[(X-d)+]
};

class LocusProblem {
 public:
  LocusProblem(const CashFlowFamily& fam, const PoolAverager& pool, double lambda, double a_bar)
      : fam_(fam), pool_(pool), lam_(lambda), a_bar_(a_bar) {}

  Moments at(double d) const {
    Moments out;
    const auto thetas = pool_.thetas();
    const auto weights = pool_.weights();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      const double t = thetas[i];
      const double w = weights[i];
      out.surv += w * fam_.survivor(d, t);
      out.q += w * fam_.default_prob(d, t);
      out.dens += w * fam_.density(d, t);
      out.partial += w * fam_.partial_expectation(d, t);
    }
    return out;
  }

  double shortfall(double d) const { return 1.0 - d * at(d).surv; }

  double profit_at_cap(double d) const {
    const Moments mo = at(d);
    return d * mo.surv + lam_ * a_bar_ * mo.q - 1.0;
  }

  /// >= 0 exactly when the zero-profit collateral at d lies in [0, a_bar].
  double feasibility(double d) const {
    const Moments mo = at(d);
    return std::min(1.0 - d * mo.surv, d * mo.surv + lam_ * a_bar_ * mo.q - 1.0);
  }

  double collateral_on_locus(const Moments& mo, double d) const {
    return (1.0 - d * mo.surv) / (lam_ * mo.q);
  }

  /// Borrower utility along the locus: E[(X-d)+] - m(d) E[1-G] = E[(X-d)+] - (1 - d E[G]) / lambda.
  double locus_value(double d) const {
    const Moments mo = at(d);
    return mo.partial - (1.0 - d * mo.surv) / lam_;
  }

  /// d/dd of locus_value, scaled by lambda: (1-lambda) E[G] - d E[g].
  double locus_slope(double d) const {
    const Moments mo = at(d);
    return (1.0 - lam_) * mo.surv - d * mo.dens;
  }

  double appendix_residual(double d) const {
    const Moments mo = at(d);
    const double m = collateral_on_locus(mo, d);
    return mo.dens * (d - lam_ * m) - (1.0 - lam_) * mo.surv;
  }

  LocusSolution evaluate(double d, double m, LocusBranch branch, TangencyForm form) const {
    const Moments mo = at(d);
    LocusSolution s;
    s.contract = {d, m};
    s.branch = branch;
    s.utility = mo.partial - m * mo.q;
    s.default_prob = mo.q;
    s.zero_profit_residual = std::abs(d * mo.surv + lam_ * m * mo.q - 1.0);
    if (form == TangencyForm::envelope) {
      s.tangency_residual = std::abs(d * mo.dens - (1.0 - lam_) * mo.surv);
    } else {
      s.tangency_residual = std::abs(lam_ * mo.surv - mo.surv + d * mo.dens - lam_ * m * mo.dens);
    }
    return s;
  }

  double lambda() const { return lam_; }
  double a_bar() const { return a_bar_; }

 private:
  const CashFlowFamily& fam_;
  const PoolAverager& pool_;
  double lam_;
  double a_bar_;
};

struct Endpoint {
  double d;
  bool open;  // the scan range ends here; not an active constraint
};

struct FeasibleInterval {
  Endpoint lo;
  Endpoint hi;
};

std::vector<double> scan_grid(double d_max, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points) + 1);
  for (int i = 0; i <= points; ++i) {
    const double u = static_cast<double>(i) / points;
    grid[static_cast<std::size_t>(i)] = d_max * u * u;
  }
  return grid;
}

/// Corner contracts sit on a boundary where the profit slope can be large (it
/// scales with a_bar), so boundaries are located three orders finer than d_tol
/// to keep the zero-profit residual below the acceptance threshold.
double boundary_tol(const SolverOptions& opts) { return 1e-3 * opts.d_tol; }

/// Boundary of {feasibility >= 0} between a feasible and an infeasible grid
/// point, returned on the feasible side.
double locate_boundary(const LocusProblem& prob, double feasible_d, double infeasible_d, double tol) {
  auto f = [&](double d) { return prob.feasibility(d); };
  const double lo = std::min(feasible_d, infeasible_d);
  const double hi = std::max(feasible_d, infeasible_d);
  const numerics::Bracket br = numerics::bisect(f, lo, hi, tol);
  return feasible_d < infeasible_d ? br.lo : br.hi;
}

/// Scan grid plus the peak of the uncollateralized revenue d E[G] and, when the
/// peak exceeds 1, both roots of d E[G] = 1 (each on its d E[G] <= 1 side). With
/// a thin default tail the feasible window just below the lower root can be far
/// narrower than a grid cell.
std::vector<double> landmark_grid(const LocusProblem& prob, double d_max, const SolverOptions& opts) {
  std::vector<double> grid = scan_grid(d_max, opts.scan_points);
  auto revenue = [&](double d) { return 1.0 - prob.shortfall(d); };
  std::size_t top = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = revenue(grid[i]);
    if (r > best) {
      best = r;
      top = i;
    }
  }
  const double a = grid[top == 0 ? 0 : top - 1];
  const double b = grid[std::min(top + 1, grid.size() - 1)];
  const numerics::Bracket gs = numerics::golden_section_max(revenue, a, b, boundary_tol(opts));
  const double peak = 0.5 * (gs.lo + gs.hi);
  grid.push_back(peak);
  auto shortfall = [&](double d) { return prob.shortfall(d); };
  if (shortfall(peak) < 0.0) {
    grid.push_back(numerics::bisect(shortfall, 0.0, peak, boundary_tol(opts)).lo);
    if (shortfall(d_max) >= 0.0) grid.push_back(numerics::bisect(shortfall, peak, d_max, boundary_tol(opts)).hi);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<FeasibleInterval> feasible_intervals(const LocusProblem& prob, double d_max,
                                                 const SolverOptions& opts) {
  const std::vector<double> grid = landmark_grid(prob, d_max, opts);
  std::vector<FeasibleInterval> out;
  std::optional<Endpoint> open_lo;
  bool prev_ok = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool ok = prob.feasibility(grid[i]) >= 0.0;
    if (ok && !prev_ok) {
      open_lo = i == 0 ? Endpoint{grid[0], true}
                       : Endpoint{locate_boundary(prob, grid[i], grid[i - 1], boundary_tol(opts)), false};
    } else if (!ok && prev_ok) {
      out.push_back({*open_lo, {locate_boundary(prob, grid[i - 1], grid[i], boundary_tol(opts)), false}});
      open_lo.reset();
    }
    prev_ok = ok;
  }
  if (open_lo) out.push_back({*open_lo, {grid.back(), true}});
  return out;
}

LocusBranch endpoint_branch(const LocusProblem& prob, const Endpoint& e) {
  if (e.open) return LocusBranch::interior;
  return std::abs(prob.profit_at_cap(e.d)) <= std::abs(prob.shortfall(e.d)) ? LocusBranch::collateral_bound
                                                                             : LocusBranch::unsecured;
}

LocusSolution endpoint_solution(const LocusProblem& prob, const Endpoint& e, TangencyForm form) {
  const LocusBranch branch = endpoint_branch(prob, e);
  double m = prob.a_bar();
  if (branch == LocusBranch::unsecured) {
    m = 0.0;
  } else if (branch == LocusBranch::interior) {
    m = std::clamp(prob.collateral_on_locus(prob.at(e.d), e.d), 0.0, prob.a_bar());
  }
  return prob.evaluate(e.d, m, branch, form);
}

LocusSolution interior_solution(const LocusProblem& prob, double d, TangencyForm form) {
  const double m = prob.collateral_on_locus(prob.at(d), d);
  return prob.evaluate(d, std::clamp(m, 0.0, prob.a_bar()), LocusBranch::interior, form);
}

/// Borrower optimum on one feasible interval of the locus.
LocusSolution maximize_on_interval(const LocusProblem& prob, const FeasibleInterval& iv,
                                   const SolverOptions& opts) {
  const double a = iv.lo.d;
  const double b = iv.hi.d;
  auto slope = [&](double d) { return prob.locus_slope(d); };
  if (!(b > a) || slope(a) <= 0.0) return endpoint_solution(prob, iv.lo, opts.form);
  if (slope(b) >= 0.0) return endpoint_solution(prob, iv.hi, opts.form);

  auto value = [&](double d) { return prob.locus_value(d); };
  const double coarse_tol = std::max(opts.d_tol, 1e-7 * (b - a));
  const numerics::Bracket gs = numerics::golden_section_max(value, a, b, coarse_tol);

  // Golden section stalls at ~sqrt(eps) on the flat top; finish on the sign of
  // the closed-form locus slope, which changes from + to - at the maximizer.
  double lo = gs.lo;
  double hi = gs.hi;
  double width = std::max(hi - lo, coarse_tol);
  while (lo > a && slope(lo) <= 0.0) {
    lo = std::max(a, lo - width);
    width *= 2.0;
  }
  width = std::max(hi - lo, coarse_tol);
  while (hi < b && slope(hi) >= 0.0) {
    hi = std::min(b, hi + width);
    width *= 2.0;
  }
  const numerics::Bracket root = numerics::bisect(slope, lo, hi, opts.d_tol);
  return interior_solution(prob, 0.5 * (root.lo + root.hi), opts.form);
}

/// Diagnostic: root of the appendix slope-equality residual on the interval.
std::optional<LocusSolution> appendix_root_on_interval(const LocusProblem& prob, const FeasibleInterval& iv,
                                                       const SolverOptions& opts) {
  auto resid = [&](double d) { return prob.appendix_residual(d); };
  const std::vector<double> grid = numerics::linspace(iv.lo.d, iv.hi.d, 201);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if ((resid(grid[i - 1]) < 0.0) != (resid(grid[i]) < 0.0)) {
      const numerics::Bracket br = numerics::bisect(resid, grid[i - 1], grid[i], opts.d_tol);
      return interior_solution(prob, 0.5 * (br.lo + br.hi), opts.form);
    }
  }
  return std::nullopt;
}

LocusSolution unsecured_only(const LocusProblem& prob, double d_max, const SolverOptions& opts) {
  // a_bar = 0: the locus meets m = 0 only where d E[G] = 1.
  auto excess = [&](double d) { return -prob.shortfall(d); };
  const std::vector<double> grid = landmark_grid(prob, d_max, opts);
  std::optional<LocusSolution> best;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if ((excess(grid[i - 1]) < 0.0) != (excess(grid[i]) < 0.0)) {
      const numerics::Bracket br = numerics::bisect(excess, grid[i - 1], grid[i], boundary_tol(opts));
      const double d = excess(br.hi) >= 0.0 ? br.hi : br.lo;
      LocusSolution s = prob.evaluate(d, 0.0, LocusBranch::collateral_bound, opts.form);
      if (!best || s.utility > best->utility) best = s;
    }
  }
  if (best) return *best;
  LocusSolution none;
  none.branch = LocusBranch::unfinanceable;
  return none;
}

}  // namespace

LocusSolution solve_on_locus(const CashFlowFamily& fam, const PoolAverager& pool, double lambda,
                             double a_bar, const SolverOptions& opts) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("liquidation efficiency must lie in (0, 1]");
  if (!(a_bar >= 0.0) || !std::isfinite(a_bar)) throw DomainError("collateral cap must be finite and >= 0");
  if (!(opts.d_tol > 0.0)) throw DomainError("solver tolerance must be > 0");
  if (opts.scan_points < 10) throw DomainError("scan_points must be >= 10");

  const LocusProblem prob(fam, pool, lambda, a_bar);
  const double d_max = fam.quantile(1.0 - 1e-10, pool.pool().hi);

  if (a_bar == 0.0) return unsecured_only(prob, d_max, opts);

  const std::vector<FeasibleInterval> intervals = feasible_intervals(prob, d_max, opts);
  if (intervals.empty()) {
    LocusSolution none;
    none.branch = LocusBranch::unfinanceable;
    return none;
  }

  std::optional<LocusSolution> best;
  if (opts.form == TangencyForm::appendix_slope) {
    for (const FeasibleInterval& iv : intervals) {
      if (auto s = appendix_root_on_interval(prob, iv, opts)) return *s;
    }
  }
  for (const FeasibleInterval& iv : intervals) {
    LocusSolution s = opts.form == TangencyForm::envelope
                          ? maximize_on_interval(prob, iv, opts)
                          : std::max({endpoint_solution(prob, iv.lo, opts.form),
                                      endpoint_solution(prob, iv.hi, opts.form)},
                                     [](const LocusSolution& x, const LocusSolution& y) {
                                       return x.utility < y.utility;
                                     });
    if (!best || s.utility > best->utility) best = s;
  }
  return *best;
}

}  // namespace sde
