#include <benchmark/benchmark.h>

#include "wpc/refgen.hpp"

namespace {

void BM_GenerateData(benchmark::State& state) {
    wpc::GeneratorConfig cfg;
    cfg.kind = wpc::WorkloadKind::DataLocality;
    cfg.x = std::uint64_t(state.range(0));
    cfg.iterations = 100000;
    cfg.seed = 42;
    for (auto _ : state) {
        auto trace = wpc::generate(cfg);
        benchmark::DoNotOptimize(trace.events.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(cfg.iterations) *
                            (cfg.harness_instructions + 1));
}
BENCHMARK(BM_GenerateData)->Arg(800)->Arg(100000);

void BM_GenerateInstruction(benchmark::State& state) {
    wpc::GeneratorConfig cfg;
    cfg.kind = wpc::WorkloadKind::InstructionLocality;
    cfg.x = std::uint64_t(state.range(0));
    cfg.iterations = 100000;
    cfg.seed = 42;
    for (auto _ : state) {
        auto trace = wpc::generate(cfg);
        benchmark::DoNotOptimize(trace.events.data());
    }
    state.SetItemsProcessed(state.iterations() * int64_t(cfg.iterations) *
                            (cfg.harness_instructions + cfg.body_instructions));
}
BENCHMARK(BM_GenerateInstruction)->Arg(400)->Arg(4000);

}  // namespace
