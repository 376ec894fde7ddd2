#include "sde_cli/scenario.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sde/error.hpp"

namespace sde::cli {

namespace {

const std::set<std::string> kShapeKeys = {"family.kind", "family.sigma", "types.kind", "types.lo",
                                          "types.hi",    "types.alpha",  "types.beta"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": not a count: '" + v + "'");
  return out;
}

std::string get(const ScenarioConfig& cfg, const std::string& key, const std::string& fallback) {
  const auto it = cfg.raw.find(key);
  return it == cfg.raw.end() ? fallback : it->second;
}

void rebuild(ScenarioConfig& cfg) {
  const std::string fam = get(cfg, "family.kind", "exponential");
  if (fam == "exponential") {
    cfg.model.family = CashFlowFamily::exponential();
  } else if (fam == "lognormal") {
    cfg.model.family = CashFlowFamily::lognormal(to_real("family.sigma", get(cfg, "family.sigma", "0.5")));
  } else {
    throw ConfigError("family.kind: expected exponential or lognormal, got '" + fam + "'");
  }

  const TypeSpace support(to_real("types.lo", get(cfg, "types.lo", "1")), to_real("types.hi", get(cfg, "types.hi", "3")));
  const std::string types = get(cfg, "types.kind", "uniform");
  if (types == "uniform") {
    cfg.model.types = TypeDistribution::uniform(support);
  } else if (types == "truncated_beta") {
    cfg.model.types = TypeDistribution::truncated_beta(support, to_real("types.alpha", get(cfg, "types.alpha", "2")),
                                                       to_real("types.beta", get(cfg, "types.beta", "2")));
  } else {
    throw ConfigError("types.kind: expected uniform or truncated_beta, got '" + types + "'");
  }
}

}  // namespace

void apply_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  EquilibriumConfig& m = cfg.model;
  if (key == "bank.lambda") {
    m.lambda_b = to_real(key, value);
  } else if (key == "market.lambda") {
    m.lambda_m = to_real(key, value);
  } else if (key == "collateral.a_bar") {
    m.a_bar = to_real(key, value);
  } else if (key == "grid.bank") {
    m.bank_grid = to_count(key, value);
  } else if (key == "grid.quadrature") {
    m.solver.quadrature_order = to_count(key, value);
  } else if (key == "grid.scan") {
    m.solver.scan_points = static_cast<int>(to_count(key, value));
  } else if (key == "tolerance.solver") {
    m.solver.d_tol = to_real(key, value);
  } else if (key == "tolerance.residual") {
    m.solver.residual_tol = to_real(key, value);
  } else if (key == "output.dir") {
    cfg.output_dir = value;
  } else if (!kShapeKeys.contains(key)) {
    throw ConfigError("unknown key '" + key + "'");
  }
  cfg.raw[key] = value;
}

void finalize(ScenarioConfig& cfg) {
  try {
    rebuild(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const EquilibriumConfig& m = cfg.model;
  if (!(m.lambda_m < m.lambda_b)) {
    throw ConfigError("market.lambda must be strictly below bank.lambda (the bank liquidates more efficiently)");
  }
  if (!(m.solver.d_tol > 0.0) || !(m.solver.residual_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (m.solver.quadrature_order < 2) throw ConfigError("grid.quadrature must be >= 2");
  if (m.solver.scan_points < 10) throw ConfigError("grid.scan must be >= 10");
  try {
    m.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig parse_scenario(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key or value");
    apply_value(cfg, key, value);
  }
  finalize(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace sde::cli
