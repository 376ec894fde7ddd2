#include "sde/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sde/error.hpp"

namespace sde::oracle {

void GridSpec::validate() const {
  if (d_points < 10 || m_points < 10 || theta_points < 10) throw DomainError("grid counts must be >= 10");
  if (refinements < 0) throw DomainError("refinements must be >= 0");
}

namespace {

struct PoolView {
  const CashFlowFamily& fam;
  const PoolAverager& avg;
  double lambda;
  double a_bar;

  double survivor(double d) const {
    return avg.average([&](double t) { return fam.survivor(d, t); });
  }
  double default_prob(double d) const {
    return avg.average([&](double t) { return fam.default_prob(d, t); });
  }
  /// Zero-profit collateral; +inf where the lender has no default exposure.
  double collateral(double d) const {
    const double q = default_prob(d);
    const double need = 1.0 - d * survivor(d);
    if (q <= 0.0) return need > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return need / (lambda * q);
  }
  double utility(const Contract& c) const {
    return avg.average([&](double t) { return borrower_utility(fam, t, c); });
  }
  /// -1 below zero collateral, 0 feasible, +1 above the limit.
  int status(double m) const {
    if (std::isnan(m)) return 1;
    if (m < 0.0) return -1;
    return m > a_bar ? 1 : 0;
  }
};

struct Candidate {
  double d;
  double m;
  bool clamped;
};

double root_of(const std::function<double(double)>& f, double lo, double hi) {
  const numerics::Bracket br = numerics::bisect(f, lo, hi, 1e-15 * std::max(1.0, hi), 200);
  return 0.5 * (br.lo + br.hi);
}

void scan(const PoolView& v, double lo, double hi, std::size_t n, std::vector<Candidate>& out) {
  const std::vector<double> grid = numerics::linspace(lo, hi, n);
  std::vector<double> ms(n);
  std::vector<int> st(n);
  for (std::size_t i = 0; i < n; ++i) {
    ms[i] = v.collateral(grid[i]);
    st[i] = v.status(ms[i]);
    if (st[i] == 0) out.push_back({grid[i], ms[i], false});
  }
  auto excess_limit = [&](double d) { return v.collateral(d) - v.a_bar; };
  auto excess_zero = [&](double d) { return v.collateral(d); };
  for (std::size_t i = 1; i < n; ++i) {
    if (st[i] == st[i - 1]) continue;
    if (st[i] == 1 || st[i - 1] == 1) {
      const double d = root_of(excess_limit, grid[i - 1], grid[i]);
      out.push_back({d, v.a_bar, true});
    }
    if (st[i] == -1 || st[i - 1] == -1) {
      const double d = root_of(excess_zero, grid[i - 1], grid[i]);
      out.push_back({d, 0.0, true});
    }
  }
}

GridOptimum search(const PoolView& v, double d_hi, const GridSpec& spec) {
  spec.validate();
  if (!(v.lambda > 0.0 && v.lambda <= 1.0)) throw DomainError("lambda must lie in (0, 1]");
  if (!(v.a_bar >= 0.0)) throw DomainError("collateral limit must be >= 0");

  double lo = 0.0;
  double hi = d_hi;
  GridOptimum best;
  bool found = false;
  double best_d = 0.0;
  for (int pass = 0; pass <= spec.refinements; ++pass) {
    std::vector<Candidate> cands;
    scan(v, lo, hi, spec.d_points, cands);
    for (const Candidate& c : cands) {
      const Contract k{c.d, std::clamp(c.m, 0.0, v.a_bar)};
      const double u = v.utility(k);
      if (!found || u > best.utility) {
        best = {k, u, c.clamped};
        best_d = c.d;
        found = true;
      }
    }
    if (!found) throw NoFeasiblePoint("oracle: no grid point satisfies zero profit with 0 <= m <= a_bar");
    const double cell = (hi - lo) / static_cast<double>(spec.d_points - 1);
    lo = std::max(0.0, best_d - 2.0 * cell);
    hi = std::min(d_hi, best_d + 2.0 * cell);
  }
  return best;
}

double face_ceiling(const CashFlowFamily& fam, double theta) { return fam.quantile(1.0 - 1e-10, theta); }

}  // namespace

GridOptimum grid_best_on_locus(const CashFlowFamily& fam, double theta, double lambda, double a_bar,
                               const GridSpec& spec) {
  const PoolAverager avg = PoolAverager::point(theta);
  return search(PoolView{fam, avg, lambda, a_bar}, face_ceiling(fam, theta), spec);
}

GridOptimum grid_best_on_pooled_locus(const CashFlowFamily& fam, const TypeDistribution& dist, PoolInterval pool,
                                      double lambda, double a_bar, const GridSpec& spec) {
  const PoolAverager avg(dist, pool, 64, PoolAverager::Degenerate::point_mass);
  return search(PoolView{fam, avg, lambda, a_bar}, face_ceiling(fam, pool.hi), spec);
}

GridOptimum grid_best_2d(const CashFlowFamily& fam, double theta, double lambda, double a_bar, double d_hi,
                         const GridSpec& spec) {
  spec.validate();
  const FinancierTech tech(lambda, Financier::bank);
  const std::vector<double> ds = numerics::linspace(0.0, d_hi, spec.d_points);
  const std::vector<double> ms = numerics::linspace(0.0, a_bar, spec.m_points);
  GridOptimum best;
  bool found = false;
  for (const double d : ds) {
    for (const double m : ms) {
      const Contract c{d, m};
      if (financier_profit(fam, theta, c, tech) < 0.0) continue;
      const double u = borrower_utility(fam, theta, c);
      if (!found || u > best.utility) {
        best = {c, u, false};
        found = true;
      }
    }
  }
  if (!found) throw NoFeasiblePoint("oracle: no (d, m) grid point breaks even");
  return best;
}

std::vector<numerics::Bracket> scan_sign_changes(const std::function<double(double)>& fn, double lo, double hi,
                                                 std::size_t points) {
  if (points < 10) throw DomainError("scan needs at least 10 points");
  const std::vector<double> grid = numerics::linspace(lo, hi, points);
  std::vector<numerics::Bracket> out;
  bool prev = fn(grid[0]) < 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool cur = fn(grid[i]) < 0.0;
    if (cur != prev) out.push_back({grid[i - 1], grid[i]});
    prev = cur;
  }
  return out;
}

double riemann_integral(const std::function<double(double)>& fn, double lo, double hi, std::size_t points) {
  if (points < 1000) throw DomainError("Riemann sum needs at least 1000 points");
  const double h = (hi - lo) / static_cast<double>(points);
  double acc = 0.0;
  for (std::size_t i = 0; i < points; ++i) acc += fn(lo + (static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

double menu_mimicry_gain(const CashFlowFamily& fam, const BankMenu& menu, const GridSpec& spec) {
  spec.validate();
  std::vector<BankContractSolution> pts;
  for (const BankContractSolution& s : menu.solutions()) {
    if (s.financed() && s.theta >= menu.ir_cutoff()) pts.push_back(s);
  }
  if (pts.size() > spec.theta_points) {
    std::vector<BankContractSolution> thinned;
    for (std::size_t k = 0; k < spec.theta_points; ++k) {
      thinned.push_back(pts[k * (pts.size() - 1) / (spec.theta_points - 1)]);
    }
    pts.swap(thinned);
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (const BankContractSolution& own : pts) {
    const double u_own = borrower_utility(fam, own.theta, own.contract);
    for (const BankContractSolution& other : pts) {
      worst = std::max(worst, borrower_utility(fam, own.theta, other.contract) - u_own);
    }
  }
  return pts.empty() ? 0.0 : worst;
}

}  // namespace sde::oracle
