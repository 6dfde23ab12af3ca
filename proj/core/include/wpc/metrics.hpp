#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "wpc/trace.hpp"

namespace wpc {

enum class Metric : std::uint8_t {
    InstrReuseDist,
    DataReuseDist,
    BranchEntropy,
    L1I_MPKI,
    L1D_MPKI,
    Branch_MPKI,
};

const char* to_string(Metric metric);
Metric metric_from_string(std::string_view name);

// The three locality families; each maps to a concrete metric per level.
enum class LocalityFamily : std::uint8_t { Instruction, Data, Branch };

const char* to_string(LocalityFamily family);
LocalityFamily family_from_string(std::string_view name);

// Instruction -> reuse distance at IR/ISA, L1I MPKI at UARCH; and so on.
Metric metric_for(LocalityFamily family, Level level);

// One locality value at one level. `defined` is false when the trace had no
// reuses / no branches to measure; the value must not be used then.
struct MetricObservation {
    std::string workload_name;
    Level level = Level::IR;
    Metric metric = Metric::InstrReuseDist;
    double value = 0.0;
    bool defined = false;
    std::uint64_t sample_count = 0;
    std::string config_label;
};

double linear_entropy(double taken_prob);  // 2*min(p, 1-p)

struct BranchSiteStats {
    std::uint64_t taken = 0;
    std::uint64_t total = 0;
    double taken_prob() const { return total ? double(taken) / double(total) : 0.0; }
    double entropy() const { return linear_entropy(taken_prob()); }
};

// Per static branch address.
struct BranchStats {
    std::unordered_map<std::uint64_t, BranchSiteStats> sites;
};

// Single-pass accumulators so file-backed traces can be analyzed without
// materializing events. Streaming result equals the batch result.

// Mean gap between consecutive occurrences of the same instruction address,
// indexing over all events; first occurrences are excluded.
class InstrReuseAccumulator {
public:
    void add(const TraceEvent& event);
    MetricObservation finish(std::string workload, Level level, std::string config_label) const;

private:
    std::unordered_map<std::uint64_t, std::uint64_t> last_index_;
    std::uint64_t index_ = 0;
    std::uint64_t gap_sum_ = 0;
    std::uint64_t gap_count_ = 0;
};

// Same mechanics, but only Load/Store events advance the index and only
// their data addresses are keyed.
class DataReuseAccumulator {
public:
    void add(const TraceEvent& event);
    MetricObservation finish(std::string workload, Level level, std::string config_label) const;

private:
    std::unordered_map<std::uint64_t, std::uint64_t> last_index_;
    std::uint64_t index_ = 0;
    std::uint64_t gap_sum_ = 0;
    std::uint64_t gap_count_ = 0;
};

// Execution-weighted mean of per-branch linear entropy.
class BranchEntropyAccumulator {
public:
    void add(const TraceEvent& event);
    MetricObservation finish(std::string workload, Level level, std::string config_label) const;
    const BranchStats& stats() const { return stats_; }

private:
    BranchStats stats_;
    std::uint64_t branch_events_ = 0;
};

MetricObservation instruction_reuse_distance(const Trace& trace,
                                             std::string_view config_label = "default");
MetricObservation data_reuse_distance(const Trace& trace,
                                      std::string_view config_label = "default");
std::pair<MetricObservation, BranchStats> branch_entropy(const Trace& trace,
                                                         std::string_view config_label = "default");

// L1I, L1D, and branch MPKI from one counter record; level is UARCH.
std::array<MetricObservation, 3> mpki_from_counters(const CounterRecord& record);

}  // namespace wpc
