#include <benchmark/benchmark.h>

#include "dlp/deep_hedge.hpp"
#include "dlp/market_model.hpp"
#include "dlp/wealth_engine.hpp"

using namespace dlp;

namespace {

const LoanTerms kTerms{0.83, 0.9, 3000.0, 0.2};
const TimeGrid kGrid = TimeGrid::uniform(0.2, 73);

PathBatch batch(std::size_t n) {
  return simulate_paths({0.0, 0.3, Scheme::ExactLognormal}, kGrid, kTerms.p0, n, 7);
}

void BM_SimulatePaths(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto b = simulate_paths({0.0, 0.3, Scheme::ExactLognormal}, kGrid, kTerms.p0, n, 7);
    benchmark::DoNotOptimize(b);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(1000)->Arg(10000);

void BM_RollForwardDelta(benchmark::State& state) {
  const auto b = batch(static_cast<std::size_t>(state.range(0)));
  const RateSet rates = RateSet::aave_2024_04();
  const Strategy s = Strategy::delta(rates);
  for (auto _ : state) {
    auto tr = roll_forward(b, s, kTerms.premium(), kTerms, rates, CostModel{20.0, 1e-4, 1e-4});
    benchmark::DoNotOptimize(tr);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RollForwardDelta)->Arg(1000)->Arg(10000);

void BM_RollForwardNeural(benchmark::State& state) {
  const auto b = batch(static_cast<std::size_t>(state.range(0)));
  const RateSet rates = RateSet::aave_2024_04();
  const Strategy s =
      Strategy::neural(PolicyParams::initialize(TrainConfig{}.architecture(), 3, kTerms.premium()));
  for (auto _ : state) {
    auto tr = roll_forward(b, s, kTerms.premium(), kTerms, rates, CostModel{20.0, 1e-4, 1e-4});
    benchmark::DoNotOptimize(tr);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RollForwardNeural)->Arg(1000);

void BM_LossGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = batch(n);
  const auto p = PolicyParams::initialize(TrainConfig{}.architecture(), 3, kTerms.premium());
  for (auto _ : state) {
    auto g = hedging_loss_gradient(p, b, 0, n, kTerms, RateSet::aave_2024_04(),
                                   CostModel{20.0, 1e-4, 1e-2}, CostMode::Smooth);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossGradient)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
