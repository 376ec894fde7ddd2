#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sde/error.hpp"
#include "sde_cli/commands.hpp"

namespace {

using Command = std::function<int(const sde::cli::ScenarioConfig&, std::ostream&)>;

int with_config(const std::string& path, const std::string& out_dir, const Command& run) {
  sde::cli::ScenarioConfig cfg;
  try {
    cfg = sde::cli::load_scenario(path);
  } catch (const sde::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sde::cli::kConfigError;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return run(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bank-market secured debt equilibrium solver"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;

  CLI::App* solve = app.add_subcommand("solve", "Solve bank menu, market contract, equilibrium and welfare");
  solve->add_option("config", config, "Scenario file (key = value)")->required();
  solve->add_option("--out", out_dir, "Output directory (overrides output.dir)");

  sde::cli::SweepSpec sweep;
  CLI::App* sw = app.add_subcommand("sweep", "Re-solve the equilibrium across one parameter");
  sw->add_option("config", config, "Scenario file (key = value)")->required();
  sw->add_option("--param", sweep.param, "lambda_m, lambda_b, a_bar or sigma")->required();
  sw->add_option("--lo", sweep.lo, "Lower end")->required();
  sw->add_option("--hi", sweep.hi, "Upper end")->required();
  sw->add_option("--steps", sweep.steps, "Grid points (>= 2)")->required();
  sw->add_option("--out", out_dir, "Output directory (overrides output.dir)");

  CLI::App* verify = app.add_subcommand("verify", "Cross-check solvers against brute-force oracles");
  verify->add_option("config", config, "Scenario file (key = value)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sde::cli::kConfigError;
  }

  if (*solve) return with_config(config, out_dir, sde::cli::run_solve);
  if (*verify) return with_config(config, {}, sde::cli::run_verify);
  return with_config(config, out_dir, [&sweep](const sde::cli::ScenarioConfig& cfg, std::ostream& log) {
    return sde::cli::run_sweep(cfg, sweep, log);
  });
}
