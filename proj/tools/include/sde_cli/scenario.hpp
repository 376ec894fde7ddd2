#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "sde/equilibrium.hpp"

namespace sde::cli {

/// Flat `key = value` scenario file. `#` starts a comment.
struct ScenarioConfig {
  EquilibriumConfig model;
  std::filesystem::path output_dir = ".";
  /// Raw values as read, for echoing into the summary.
  std::map<std::string, std::string> raw;
};

/// Keys: family.kind (exponential | lognormal), family.sigma, types.kind
/// (uniform | truncated_beta), types.lo, types.hi, types.alpha, types.beta,
/// bank.lambda, market.lambda, collateral.a_bar, grid.bank, grid.quadrature,
/// grid.scan, tolerance.solver, tolerance.residual, output.dir.
/// Throws ConfigError on unknown keys, malformed numbers or invalid models.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Sets one key; call `finalize` afterwards.
void apply_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);
/// Rebuilds the family and type distribution from the raw values and
/// re-validates the whole model.
void finalize(ScenarioConfig& cfg);

}  // namespace sde::cli
