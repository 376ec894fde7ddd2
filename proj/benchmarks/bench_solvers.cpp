#include <benchmark/benchmark.h>

#include "sde/bank_solver.hpp"
#include "sde/equilibrium.hpp"
#include "sde/market_solver.hpp"
#include "sde/welfare.hpp"

namespace {

const sde::CashFlowFamily kExp = sde::CashFlowFamily::exponential();
const sde::TypeDistribution kTypes = sde::TypeDistribution::uniform({1.0, 3.0});

void BM_BankContract(benchmark::State& state) {
  const double a_bar = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sde::solve_bank_contract(kExp, 2.0, 0.9, a_bar));
}
BENCHMARK(BM_BankContract)->Arg(2)->Arg(20);

void BM_BankMenu(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sde::bank_menu(kExp, kTypes, 0.9, 2.0, nodes));
}
BENCHMARK(BM_BankMenu)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_MarketContract(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sde::solve_market_contract(kExp, kTypes, {1.5, 3.0}, 0.85, 2.0));
}
BENCHMARK(BM_MarketContract)->Unit(benchmark::kMicrosecond);

void BM_Equilibrium(benchmark::State& state) {
  const sde::EquilibriumConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(sde::solve_equilibrium(cfg));
}
BENCHMARK(BM_Equilibrium)->Unit(benchmark::kMillisecond);

void BM_RegimeWelfare(benchmark::State& state) {
  const sde::EquilibriumConfig cfg;
  const sde::Allocation alloc = sde::solve_regime(cfg, sde::WelfareRegime::B);
  for (auto _ : state) benchmark::DoNotOptimize(sde::regime_welfare(alloc, cfg.family, cfg.types));
}
BENCHMARK(BM_RegimeWelfare)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
