#include "wpc/metrics.hpp"

#include <algorithm>

#include "wpc/error.hpp"

namespace wpc {

const char* to_string(Metric metric) {
    switch (metric) {
        case Metric::InstrReuseDist: return "InstrReuseDist";
        case Metric::DataReuseDist: return "DataReuseDist";
        case Metric::BranchEntropy: return "BranchEntropy";
        case Metric::L1I_MPKI: return "L1I_MPKI";
        case Metric::L1D_MPKI: return "L1D_MPKI";
        case Metric::Branch_MPKI: return "Branch_MPKI";
    }
    return "?";
}

Metric metric_from_string(std::string_view name) {
    if (name == "InstrReuseDist") return Metric::InstrReuseDist;
    if (name == "DataReuseDist") return Metric::DataReuseDist;
    if (name == "BranchEntropy") return Metric::BranchEntropy;
    if (name == "L1I_MPKI") return Metric::L1I_MPKI;
    if (name == "L1D_MPKI") return Metric::L1D_MPKI;
    if (name == "Branch_MPKI") return Metric::Branch_MPKI;
    throw ParameterError("unknown metric: " + std::string(name));
}

const char* to_string(LocalityFamily family) {
    switch (family) {
        case LocalityFamily::Instruction: return "inst";
        case LocalityFamily::Data: return "data";
        case LocalityFamily::Branch: return "branch";
    }
    return "?";
}

LocalityFamily family_from_string(std::string_view name) {
    if (name == "inst" || name == "instruction") return LocalityFamily::Instruction;
    if (name == "data") return LocalityFamily::Data;
    if (name == "branch") return LocalityFamily::Branch;
    throw ParameterError("unknown locality family: " + std::string(name));
}

Metric metric_for(LocalityFamily family, Level level) {
    const bool uarch = level == Level::UARCH;
    switch (family) {
        case LocalityFamily::Instruction:
            return uarch ? Metric::L1I_MPKI : Metric::InstrReuseDist;
        case LocalityFamily::Data:
            return uarch ? Metric::L1D_MPKI : Metric::DataReuseDist;
        case LocalityFamily::Branch:
            return uarch ? Metric::Branch_MPKI : Metric::BranchEntropy;
    }
    throw ParameterError("unknown locality family");
}

double linear_entropy(double taken_prob) {
    return 2.0 * std::min(taken_prob, 1.0 - taken_prob);
}

namespace {

MetricObservation make_observation(std::string workload, Level level, Metric metric,
                                   std::string config_label, std::uint64_t samples,
                                   double value) {
    MetricObservation obs;
    obs.workload_name = std::move(workload);
    obs.level = level;
    obs.metric = metric;
    obs.config_label = std::move(config_label);
    obs.sample_count = samples;
    obs.defined = samples > 0;
    obs.value = obs.defined ? value : 0.0;
    return obs;
}

}  // namespace

void InstrReuseAccumulator::add(const TraceEvent& event) {
    const auto [it, fresh] = last_index_.try_emplace(event.instr_addr, index_);
    if (!fresh) {
        gap_sum_ += index_ - it->second;
        ++gap_count_;
        it->second = index_;
    }
    ++index_;
}

MetricObservation InstrReuseAccumulator::finish(std::string workload, Level level,
                                                std::string config_label) const {
    const double mean = gap_count_ ? double(gap_sum_) / double(gap_count_) : 0.0;
    return make_observation(std::move(workload), level, Metric::InstrReuseDist,
                            std::move(config_label), gap_count_, mean);
}

void DataReuseAccumulator::add(const TraceEvent& event) {
    if (event.kind != EventKind::Load && event.kind != EventKind::Store) return;
    const auto [it, fresh] = last_index_.try_emplace(event.data_or_target_addr, index_);
    if (!fresh) {
        gap_sum_ += index_ - it->second;
        ++gap_count_;
        it->second = index_;
    }
    ++index_;
}

MetricObservation DataReuseAccumulator::finish(std::string workload, Level level,
                                               std::string config_label) const {
    const double mean = gap_count_ ? double(gap_sum_) / double(gap_count_) : 0.0;
    return make_observation(std::move(workload), level, Metric::DataReuseDist,
                            std::move(config_label), gap_count_, mean);
}

void BranchEntropyAccumulator::add(const TraceEvent& event) {
    if (event.kind != EventKind::Branch) return;
    BranchSiteStats& site = stats_.sites[event.instr_addr];
    site.taken += event.taken ? 1 : 0;
    site.total += 1;
    ++branch_events_;
}

MetricObservation BranchEntropyAccumulator::finish(std::string workload, Level level,
                                                   std::string config_label) const {
    double weighted = 0;
    for (const auto& [addr, site] : stats_.sites) weighted += site.entropy() * double(site.total);
    const double value = branch_events_ ? weighted / double(branch_events_) : 0.0;
    return make_observation(std::move(workload), level, Metric::BranchEntropy,
                            std::move(config_label), branch_events_, value);
}

MetricObservation instruction_reuse_distance(const Trace& trace, std::string_view config_label) {
    InstrReuseAccumulator acc;
    for (const TraceEvent& e : trace.events) acc.add(e);
    return acc.finish(trace.workload_name, trace.level, std::string(config_label));
}

MetricObservation data_reuse_distance(const Trace& trace, std::string_view config_label) {
    DataReuseAccumulator acc;
    for (const TraceEvent& e : trace.events) acc.add(e);
    return acc.finish(trace.workload_name, trace.level, std::string(config_label));
}

std::pair<MetricObservation, BranchStats> branch_entropy(const Trace& trace,
                                                         std::string_view config_label) {
    BranchEntropyAccumulator acc;
    for (const TraceEvent& e : trace.events) acc.add(e);
    return {acc.finish(trace.workload_name, trace.level, std::string(config_label)), acc.stats()};
}

std::array<MetricObservation, 3> mpki_from_counters(const CounterRecord& record) {
    if (record.instructions == 0) throw ParameterError("counter record has zero instructions");
    auto make = [&](Metric metric, std::uint64_t misses) {
        return make_observation(record.workload_name, Level::UARCH, metric, record.config_label,
                                record.instructions,
                                double(misses) * 1000.0 / double(record.instructions));
    };
    return {make(Metric::L1I_MPKI, record.l1i_misses), make(Metric::L1D_MPKI, record.l1d_misses),
            make(Metric::Branch_MPKI, record.branch_mispredictions)};
}

}  // namespace wpc
