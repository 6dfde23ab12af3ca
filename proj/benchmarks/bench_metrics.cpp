#include <benchmark/benchmark.h>

#include "wpc/metrics.hpp"
#include "wpc/refgen.hpp"

namespace {

wpc::Trace make_trace(wpc::WorkloadKind kind, std::uint64_t x) {
    wpc::GeneratorConfig cfg;
    cfg.kind = kind;
    cfg.x = x;
    cfg.iterations = 200000;
    cfg.seed = 42;
    return wpc::generate(cfg);
}

void BM_InstructionReuse(benchmark::State& state) {
    const auto trace = make_trace(wpc::WorkloadKind::InstructionLocality,
                                  std::uint64_t(state.range(0)));
    for (auto _ : state) {
        auto obs = wpc::instruction_reuse_distance(trace);
        benchmark::DoNotOptimize(obs.value);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(trace.events.size()));
}
BENCHMARK(BM_InstructionReuse)->Arg(400)->Arg(4000);

void BM_DataReuse(benchmark::State& state) {
    const auto trace = make_trace(wpc::WorkloadKind::DataLocality, std::uint64_t(state.range(0)));
    for (auto _ : state) {
        auto obs = wpc::data_reuse_distance(trace);
        benchmark::DoNotOptimize(obs.value);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(trace.events.size()));
}
BENCHMARK(BM_DataReuse)->Arg(800)->Arg(100000);

void BM_BranchEntropy(benchmark::State& state) {
    const auto trace = make_trace(wpc::WorkloadKind::BranchLocality, 250);
    for (auto _ : state) {
        auto result = wpc::branch_entropy(trace);
        benchmark::DoNotOptimize(result.first.value);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(trace.events.size()));
}
BENCHMARK(BM_BranchEntropy);

}  // namespace
