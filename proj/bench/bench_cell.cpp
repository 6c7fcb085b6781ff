// Serial reference runner vs. the OpenMP cell runner on a fixed budget.

#include <benchmark/benchmark.h>

#include "mimo/simkit.hpp"

namespace {

mimo::Link link_for(mimo::Scheme scheme) {
  return mimo::Link{4, 4, scheme, mimo::parse_modulation_set("QAM16-QAM16")};
}

// Error target unreachable so every run spends exactly max_channel_uses.
constexpr mimo::StoppingRule kFixedUses{~0ULL, 20'000};

void BM_CellSerial(benchmark::State& state) {
  const auto link = link_for(static_cast<mimo::Scheme>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::run_cell_serial(link, 12.0, 0, 7, kFixedUses));
  }
  state.SetItemsProcessed(state.iterations() * kFixedUses.max_channel_uses);
}

void BM_CellOpenMP(benchmark::State& state) {
  const auto link = link_for(static_cast<mimo::Scheme>(state.range(0)));
  const auto workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::run_cell(link, 12.0, 0, 7, kFixedUses, workers, 1024));
  }
  state.SetItemsProcessed(state.iterations() * kFixedUses.max_channel_uses);
}

}  // namespace

BENCHMARK(BM_CellSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellOpenMP)
    ->ArgsProduct({{0, 1}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
