#include <benchmark/benchmark.h>

#include "wpc/refgen.hpp"
#include "wpc/sim.hpp"

namespace {

void BM_Simulate(benchmark::State& state) {
    wpc::GeneratorConfig cfg;
    cfg.kind = wpc::WorkloadKind::DataLocality;
    cfg.x = std::uint64_t(state.range(0));
    cfg.iterations = 200000;
    cfg.seed = 42;
    const auto trace = wpc::generate(cfg);
    const auto preset = wpc::platform_preset("gold5120t-like");
    for (auto _ : state) {
        auto result = wpc::simulate(trace, preset.l1i, preset.l1d, preset.predictor);
        benchmark::DoNotOptimize(result.l1d_misses);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(trace.events.size()));
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(8000);

void BM_SimulatePrefetch(benchmark::State& state) {
    wpc::GeneratorConfig cfg;
    cfg.kind = wpc::WorkloadKind::DataLocality;
    cfg.x = 8000;
    cfg.iterations = 200000;
    cfg.seed = 42;
    const auto trace = wpc::generate(cfg);
    auto preset = wpc::platform_preset("gold5120t-like");
    preset.l1i.prefetch_next_line = true;
    preset.l1d.prefetch_next_line = true;
    for (auto _ : state) {
        auto result = wpc::simulate(trace, preset.l1i, preset.l1d, preset.predictor);
        benchmark::DoNotOptimize(result.l1d_misses);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(trace.events.size()));
}
BENCHMARK(BM_SimulatePrefetch);

}  // namespace
