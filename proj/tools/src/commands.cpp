#include "sde_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sde/error.hpp"
#include "sde/oracle.hpp"
#include "sde/welfare.hpp"

namespace sde::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) { return fmt::format("{:.9g}", x); }

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(log, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const DomainError& e) {
    fmt::print(log, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const NoConvergence& e) {
    fmt::print(log, "solver did not converge: {}\n", e.what());
    return kNoConvergence;
  } catch (const std::exception& e) {
    fmt::print(log, "error: {}\n", e.what());
    return kFailure;
  }
}

std::ofstream open_out(const std::filesystem::path& dir, const char* name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
  return f;
}

/// Every regime of one configuration, solved once.
struct Solved {
  Equilibrium eq;
  Allocation bank{Allocation::empty(WelfareRegime::B)};
  Allocation market{Allocation::empty(WelfareRegime::M)};
  Allocation coexist{Allocation::empty(WelfareRegime::BM)};
  WelfareReport w_bank;
  WelfareReport w_market;
  WelfareReport w_coexist;
  Decomposition decomposition;
};

Solved solve_all(const SelectionProblem& p) {
  const EquilibriumConfig& m = p.config();
  const std::size_t order = m.solver.quadrature_order;
  Solved s;
  s.eq = solve_equilibrium(p);
  if (p.bank_menu()) s.bank = allocation_from(*p.bank_menu(), m.lambda_b);
  s.market = solve_regime(m, WelfareRegime::M);
  s.coexist = allocation_from(s.eq, m.lambda_b, m.lambda_m, p.top());
  s.w_bank = regime_welfare(s.bank, m.family, m.types, order);
  s.w_market = regime_welfare(s.market, m.family, m.types, order);
  s.w_coexist = regime_welfare(s.coexist, m.family, m.types, order);
  s.decomposition = decompose(s.bank, s.w_bank, s.coexist, s.w_coexist, m.family, m.types, order);
  return s;
}

}  // namespace

unsigned thread_cap() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SDE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return n;
}

int run_solve(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const SelectionProblem p(cfg.model);
    const Solved s = solve_all(p);
    const Equilibrium& eq = s.eq;

    {
      std::ofstream f = open_out(cfg.output_dir, "bank_menu.csv");
      f << "theta,d,m,branch,utility,default_prob\n";
      if (p.bank_menu()) {
        for (const BankContractSolution& b : p.bank_menu()->solutions()) {
          f << fmt::format("{},{},{},{},{},{}\n", num(b.theta), num(b.contract.face), num(b.contract.collateral),
                           to_string(b.branch), num(b.utility), num(b.default_prob));
        }
      }
    }
    {
      std::ofstream f = open_out(cfg.output_dir, "market.csv");
      f << "d_m,m_m,pool_lo,pool_hi,branch\n";
      f << fmt::format("{},{},{},{},{}\n", num(eq.market.contract.face), num(eq.market.contract.collateral),
                       num(eq.market.pool.lo), num(eq.market.pool.hi), to_string(eq.market.branch));
    }
    {
      const Decomposition& d = s.decomposition;
      std::ofstream f = open_out(cfg.output_dir, "equilibrium.csv");
      f << "regime,theta_ir,theta_star,W_B,W_M,W_BM,liquidation_penalty,screening_relief,extensive_margin,total_diff\n";
      f << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", to_string(eq.regime), num(eq.ir_cutoff),
                       num(eq.star_cutoff), num(s.w_bank.total), num(s.w_market.total), num(s.w_coexist.total),
                       num(d.liquidation_penalty), num(d.screening_relief), num(d.extensive_margin),
                       num(d.total_diff));
    }
    {
      std::ofstream f = open_out(cfg.output_dir, "summary.txt");
      fmt::print(f, "scenario\n");
      for (const auto& [k, v] : cfg.raw) fmt::print(f, "  {} = {}\n", k, v);
      fmt::print(f, "equilibrium\n");
      fmt::print(f, "  regime            {}\n", to_string(eq.regime));
      fmt::print(f, "  bank IR cutoff    {}\n", num(eq.ir_cutoff));
      fmt::print(f, "  selection cutoff  {}\n", num(eq.star_cutoff));
      fmt::print(f, "  market contract   d = {}, m = {} ({}) on [{}, {}]\n", num(eq.market.contract.face),
                 num(eq.market.contract.collateral), to_string(eq.market.branch), num(eq.market.pool.lo),
                 num(eq.market.pool.hi));
      fmt::print(f, "  Phi(theta_b; theta_b) {}  Phi(theta_hi; theta_b) {}  Phi(theta_hi; theta_hi) {}\n",
                 num(eq.diagnostics.at_ir_widest_pool), num(eq.diagnostics.at_top_widest_pool),
                 num(eq.diagnostics.at_top_point_pool));
      fmt::print(f, "welfare            total        gross        deadweight   financed     private\n");
      for (const WelfareReport* w : {&s.w_bank, &s.w_market, &s.w_coexist}) {
        fmt::print(f, "  {:<16} {:<12.9g} {:<12.9g} {:<12.9g} {:<12.9g} {:.9g}\n", to_string(w->regime), w->total,
                   w->gross_surplus, w->deadweight, w->financed_measure, w->private_surplus);
      }
      const Decomposition& d = s.decomposition;
      fmt::print(f, "W(BM) - W(B)       {}\n", num(d.total_diff));
      fmt::print(f, "  liquidation penalty {}\n  screening relief    {}\n  extensive margin    {}\n",
                 num(d.liquidation_penalty), num(d.screening_relief), num(d.extensive_margin));
    }
    fmt::print(log, "{}: theta_b = {}, theta* = {}; wrote {}\n", to_string(eq.regime), num(eq.ir_cutoff),
               num(eq.star_cutoff), cfg.output_dir.string());
    return static_cast<int>(kOk);
  });
}

void SweepSpec::validate() const {
  if (param != "lambda_m" && param != "lambda_b" && param != "a_bar" && param != "sigma") {
    throw ConfigError("--param must be one of lambda_m, lambda_b, a_bar, sigma");
  }
  if (!(lo < hi)) throw ConfigError("sweep needs lo < hi");
  if (steps < 2) throw ConfigError("sweep needs steps >= 2");
}

namespace {

const char* sweep_key(const std::string& param) {
  if (param == "lambda_m") return "market.lambda";
  if (param == "lambda_b") return "bank.lambda";
  if (param == "a_bar") return "collateral.a_bar";
  return "family.sigma";
}

struct SweepRow {
  double value = 0.0;
  double theta_star = kNaN;
  std::string regime = "none";
  double bank_share = kNaN;
  double w_bank = kNaN;
  double w_market = kNaN;
  double w_coexist = kNaN;
  double spread_gap = kNaN;
  std::string status = "ok";
};

SweepRow sweep_point(const ScenarioConfig& base, const char* key, double value) {
  SweepRow row;
  row.value = value;
  try {
    ScenarioConfig cfg = base;
    apply_value(cfg, key, fmt::format("{:.17g}", value));
    finalize(cfg);
    const SelectionProblem p(cfg.model);
    const Solved s = solve_all(p);
    const TypeDistribution& dist = cfg.model.types;
    row.theta_star = s.eq.star_cutoff;
    row.regime = to_string(s.eq.regime);
    const double below = dist.cdf(s.eq.ir_cutoff);
    row.bank_share = below < 1.0 ? (dist.cdf(s.eq.star_cutoff) - below) / (1.0 - below) : 0.0;
    row.w_bank = s.w_bank.total;
    row.w_market = s.w_market.total;
    row.w_coexist = s.w_coexist.total;
    const BankContractSolution b = p.bank_solution(s.eq.star_cutoff);
    if (b.financed() && s.eq.market.feasible()) row.spread_gap = b.contract.face - s.eq.market.contract.face;
  } catch (const ConfigError&) {
    row.status = "invalid";
  } catch (const DomainError&) {
    row.status = "invalid";
  } catch (const NoConvergence&) {
    row.status = "no_convergence";
  } catch (const std::exception&) {
    row.status = "failed";
  }
  return row;
}

}  // namespace

int run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep, std::ostream& log) {
  return guarded(log, [&] {
    sweep.validate();
    const auto kind = cfg.raw.find("family.kind");
    if (sweep.param == "sigma" && (kind == cfg.raw.end() || kind->second != "lognormal")) {
      throw ConfigError("sigma sweeps need family.kind = lognormal");
    }
    const char* key = sweep_key(sweep.param);
    const std::size_t n = static_cast<std::size_t>(sweep.steps);
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double v = i + 1 == n ? sweep.hi : sweep.lo + t * (sweep.hi - sweep.lo);
        rows[i] = sweep_point(cfg, key, v);
      }
    };
    const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::ofstream f = open_out(cfg.output_dir, "sweep.csv");
    f << "param_value,theta_star,regime,bank_share,W_B,W_M,W_BM,spread_gap_at_cutoff,status\n";
    std::size_t failed = 0;
    for (const SweepRow& r : rows) {
      f << fmt::format("{},{},{},{},{},{},{},{},{}\n", num(r.value), num(r.theta_star), r.regime, num(r.bank_share),
                       num(r.w_bank), num(r.w_market), num(r.w_coexist), num(r.spread_gap), r.status);
      failed += r.status != "ok";
    }
    fmt::print(log, "sweep {} over [{}, {}]: {} rows, {} failed; wrote {}\n", sweep.param, num(sweep.lo),
               num(sweep.hi), n, failed, (cfg.output_dir / "sweep.csv").string());
    return static_cast<int>(kOk);
  });
}

namespace {

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
  std::string note;
};

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  void add(std::string name, double value, double tolerance, std::string note = {}) {
    record({std::move(name), value, tolerance, std::abs(value) <= tolerance, std::move(note)});
  }
  void flag(std::string name, bool pass, std::string note) {
    record({std::move(name), kNaN, kNaN, pass, std::move(note)});
  }
  bool all_passed() const noexcept { return failures_ == 0; }
  int failures() const noexcept { return failures_; }
  int total() const noexcept { return total_; }

 private:
  void record(const Check& c) {
    ++total_;
    failures_ += !c.pass;
    if (std::isnan(c.tolerance)) {
      fmt::print(out_, "{} {} {}\n", c.pass ? "PASS" : "FAIL", c.name, c.note);
    } else {
      fmt::print(out_, "{} {} |err| = {:.3e} (tol {:.1e}){}{}\n", c.pass ? "PASS" : "FAIL", c.name,
                 std::abs(c.value), c.tolerance, c.note.empty() ? "" : " ", c.note);
    }
  }

  std::ostream& out_;
  int failures_ = 0;
  int total_ = 0;
};

constexpr double kOracleTol = 1e-7;
constexpr double kIndifferenceTol = 1e-8;
constexpr double kMomentTol = 1e-6;
constexpr double kWelfareTol = 1e-5;
constexpr double kIdentityTol = 1e-9;
constexpr double kDirectTol = 1e-6;
constexpr std::size_t kRiemannPoints = 100000;

}  // namespace

int run_verify(const ScenarioConfig& cfg, std::ostream& report) {
  return guarded(report, [&] {
    const EquilibriumConfig& m = cfg.model;
    const CashFlowFamily& fam = m.family;
    const TypeDistribution& dist = m.types;
    const double lo = dist.support().lo();
    const double hi = dist.support().hi();
    Report r(report);

    const SelectionProblem p(m);
    const Solved s = solve_all(p);
    const oracle::GridSpec grid{};

    for (const double theta : numerics::linspace(lo, hi, 5)) {
      const BankContractSolution b = p.bank_solution(theta);
      const std::string name = fmt::format("bank_oracle[theta={}]", num(theta));
      try {
        const oracle::GridOptimum o = oracle::grid_best_on_locus(fam, theta, m.lambda_b, m.a_bar, grid);
        if (!b.financed()) {
          r.flag(name, false, "oracle finds a contract the solver missed");
        } else {
          r.add(name, o.utility - b.utility, kOracleTol);
        }
      } catch (const NoFeasiblePoint&) {
        r.flag(name, !b.financed(), "both report unfinanceable");
      }
    }

    std::vector<PoolInterval> pools = {{lo, hi}, {0.5 * (lo + hi), hi}};
    if (s.eq.star_cutoff < hi) pools.push_back({s.eq.star_cutoff, hi});
    for (const PoolInterval& pool : pools) {
      const MarketContract mc = solve_market_contract(fam, dist, pool, m.lambda_m, m.a_bar, m.solver);
      const std::string name = fmt::format("market_oracle[{},{}]", num(pool.lo), num(pool.hi));
      try {
        const oracle::GridOptimum o = oracle::grid_best_on_pooled_locus(fam, dist, pool, m.lambda_m, m.a_bar, grid);
        if (!mc.feasible()) {
          r.flag(name, false, "oracle finds a contract the solver missed");
        } else {
          r.add(name, o.utility - mc.pool_utility, kOracleTol);
        }
      } catch (const NoFeasiblePoint&) {
        r.flag(name, !mc.feasible(), "both report unfinanceable");
      }
    }

    {
      const double theta = 0.5 * (lo + hi);
      const BankContractSolution b = solve_bank_contract(fam, theta, m.lambda_m, m.a_bar, m.solver);
      const MarketContract mc = solve_market_contract(fam, dist, {theta, theta}, m.lambda_m, m.a_bar, m.solver);
      const double gap = std::max({std::abs(b.contract.face - mc.contract.face),
                                   std::abs(b.contract.collateral - mc.contract.collateral),
                                   std::abs(b.utility - mc.pool_utility)});
      r.add("point_mass_market_vs_bank", gap, kIdentityTol);
    }

    if (s.eq.ir_cutoff > lo && s.eq.ir_cutoff < hi && p.bank_menu()) {
      r.add("ir_cutoff_utility", p.bank_solution(s.eq.ir_cutoff).utility, kIndifferenceTol);
    } else {
      r.flag("ir_cutoff_utility", true, "cutoff on the boundary; skipped");
    }

    if (s.eq.regime == Regime::coexistence) {
      r.add("equilibrium_indifference", s.eq.indifference_residual, kIndifferenceTol);
    } else {
      r.flag("equilibrium_indifference", true, fmt::format("regime {}; no interior cutoff", to_string(s.eq.regime)));
    }

    if (p.ir_cutoff() < hi && p.bank_menu()) {
      const auto gamma = oracle::scan_sign_changes([&](double v) { return p.gamma(v); }, p.ir_cutoff(), hi, 100);
      const bool ok = s.eq.regime == Regime::coexistence ? gamma.size() == 1 : gamma.size() <= 1;
      r.flag("gamma_sign_changes", ok, fmt::format("{} on a 100-point scan", gamma.size()));
      const MarketContract at_star = p.market_for(std::min(s.eq.star_cutoff, hi));
      const auto phi =
          oracle::scan_sign_changes([&](double t) { return p.utility_gap(t, at_star); }, p.ir_cutoff(), hi, 100);
      r.flag("phi_sign_changes", phi.size() <= 1, fmt::format("{} on a 100-point scan", phi.size()));
    }

    {
      const double d = fam.quantile(0.5, 0.5 * (lo + hi));
      const double quad = pool_moment(fam, dist, {lo, hi}, d, PoolIntegrand::survivor, m.solver.quadrature_order);
      const double mass = dist.cdf(hi) - dist.cdf(lo);
      const double riemann =
          oracle::riemann_integral([&](double t) { return fam.survivor(d, t) * dist.pdf(t); }, lo, hi, kRiemannPoints) /
          mass;
      r.add("pool_moment_vs_riemann", quad - riemann, kMomentTol);
    }

    auto direct = [&](const Allocation& a) {
      return oracle::riemann_integral([&](double t) { return pointwise_welfare(a, fam, t) * dist.pdf(t); }, lo, hi,
                                      kRiemannPoints);
    };
    r.add("welfare_B_vs_riemann", s.w_bank.total - direct(s.bank), kWelfareTol);
    r.add("welfare_M_vs_riemann", s.w_market.total - direct(s.market), kWelfareTol);
    r.add("welfare_BM_vs_riemann", s.w_coexist.total - direct(s.coexist), kWelfareTol);

    const Decomposition& d = s.decomposition;
    r.add("decomposition_identity",
          d.liquidation_penalty + d.screening_relief + d.extensive_margin - d.total_diff, kIdentityTol);
    const double direct_diff = oracle::riemann_integral(
        [&](double t) {
          return (pointwise_welfare(s.coexist, fam, t) - pointwise_welfare(s.bank, fam, t)) * dist.pdf(t);
        },
        lo, hi, kRiemannPoints);
    r.add("decomposition_vs_direct", d.total_diff - direct_diff, kDirectTol);

    fmt::print(report, "{} of {} checks passed\n", r.total() - r.failures(), r.total());
    return static_cast<int>(r.all_passed() ? kOk : kVerificationFailed);
  });
}

}  // namespace sde::cli
