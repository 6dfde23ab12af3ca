#include "wpc/refgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wpc/error.hpp"
#include "wpc/metrics.hpp"
#include "wpc/rng.hpp"

namespace wpc {

namespace {

constexpr std::uint16_t kTagHarness = 1;
constexpr std::uint16_t kTagPayload = 2;

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::vector<std::string> reference_tag_table() { return {"untagged", "harness", "payload"}; }

void append_harness(std::vector<TraceEvent>& events, std::uint32_t count) {
    for (std::uint32_t j = 0; j < count; ++j) {
        TraceEvent e;
        e.kind = EventKind::Compute;
        e.instr_addr = kHarnessBase + 4ull * j;
        e.tag_id = kTagHarness;
        events.push_back(e);
    }
}

Trace make_trace(const GeneratorConfig& cfg, const char* name) {
    Trace trace;
    trace.level = cfg.level;
    trace.workload_name = name;
    trace.tag_table = reference_tag_table();
    trace.seed = cfg.seed;
    return trace;
}

}  // namespace

const char* to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::DataLocality: return "data";
        case WorkloadKind::InstructionLocality: return "inst";
        case WorkloadKind::BranchLocality: return "branch";
    }
    return "?";
}

WorkloadKind workload_kind_from_string(std::string_view name) {
    if (name == "data") return WorkloadKind::DataLocality;
    if (name == "inst" || name == "instruction") return WorkloadKind::InstructionLocality;
    if (name == "branch") return WorkloadKind::BranchLocality;
    throw ParameterError("unknown workload kind: " + std::string(name));
}

void GeneratorConfig::validate() const {
    if (iterations < 1) throw ParameterError("iterations must be >= 1");
    if (harness_instructions > 64)
        throw ParameterError("harness_instructions must be <= 64 (harness region is 256 bytes)");
    switch (kind) {
        case WorkloadKind::DataLocality:
            if (x < 1) throw ParameterError("x must be >= 1 for the data locality workload");
            if (!is_pow2(element_stride)) throw ParameterError("element_stride must be a power of two");
            break;
        case WorkloadKind::InstructionLocality:
            if (x < 1) throw ParameterError("x must be >= 1 for the instruction locality workload");
            if (body_instructions < 1) throw ParameterError("body_instructions must be >= 1");
            if (!is_pow2(function_stride))
                throw ParameterError("function_stride must be a power of two");
            if (4ull * body_instructions > function_stride)
                throw ParameterError("function bodies overlap: 4*body_instructions exceeds function_stride");
            break;
        case WorkloadKind::BranchLocality:
            if (branch_range < 2) throw ParameterError("branch_range must be >= 2");
            if (x > branch_range)
                throw ParameterError("x must be <= branch_range for the branch locality workload");
            break;
    }
}

Trace generate_data_locality(const GeneratorConfig& cfg) {
    if (cfg.kind != WorkloadKind::DataLocality)
        throw ParameterError("config kind is not DataLocality");
    cfg.validate();
    Trace trace = make_trace(cfg, "ref-data");
    trace.events.reserve(cfg.iterations * (cfg.harness_instructions + 1));
    SplitMix64 rng(cfg.seed);
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        append_harness(trace.events, cfg.harness_instructions);
        TraceEvent e;
        e.kind = EventKind::Load;
        e.instr_addr = kCodeBase;
        e.data_or_target_addr = kDataBase + cfg.element_stride * rng.below(cfg.x);
        e.tag_id = kTagPayload;
        trace.events.push_back(e);
    }
    return trace;
}

Trace generate_instruction_locality(const GeneratorConfig& cfg) {
    if (cfg.kind != WorkloadKind::InstructionLocality)
        throw ParameterError("config kind is not InstructionLocality");
    cfg.validate();
    Trace trace = make_trace(cfg, "ref-inst");
    trace.events.reserve(cfg.iterations * (cfg.harness_instructions + cfg.body_instructions));
    SplitMix64 rng(cfg.seed);
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        append_harness(trace.events, cfg.harness_instructions);
        const std::uint64_t entry = kCodeBase + cfg.function_stride * rng.below(cfg.x);
        for (std::uint32_t j = 0; j < cfg.body_instructions; ++j) {
            TraceEvent e;
            e.kind = EventKind::Compute;
            e.instr_addr = entry + 4ull * j;
            e.tag_id = kTagPayload;
            trace.events.push_back(e);
        }
    }
    return trace;
}

Trace generate_branch_locality(const GeneratorConfig& cfg) {
    if (cfg.kind != WorkloadKind::BranchLocality)
        throw ParameterError("config kind is not BranchLocality");
    cfg.validate();
    Trace trace = make_trace(cfg, "ref-branch");
    trace.events.reserve(cfg.iterations * (cfg.harness_instructions + 1));
    SplitMix64 rng(cfg.seed);
    for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
        append_harness(trace.events, cfg.harness_instructions);
        TraceEvent e;
        e.kind = EventKind::Branch;
        e.instr_addr = kCodeBase;
        e.data_or_target_addr = kBranchTargetAddr;
        e.taken = rng.below(cfg.branch_range) < cfg.x;
        e.tag_id = kTagPayload;
        trace.events.push_back(e);
    }
    return trace;
}

Trace generate(const GeneratorConfig& cfg) {
    switch (cfg.kind) {
        case WorkloadKind::DataLocality: return generate_data_locality(cfg);
        case WorkloadKind::InstructionLocality: return generate_instruction_locality(cfg);
        case WorkloadKind::BranchLocality: return generate_branch_locality(cfg);
    }
    throw ParameterError("unknown workload kind");
}

double theoretical_prediction(const GeneratorConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case WorkloadKind::DataLocality:
            return double(cfg.x);
        case WorkloadKind::InstructionLocality:
            return double(cfg.x) * cfg.body_instructions;
        case WorkloadKind::BranchLocality: {
            const double p = double(cfg.x) / double(cfg.branch_range);
            return 2.0 * std::min(p, 1.0 - p);
        }
    }
    throw ParameterError("unknown workload kind");
}

std::uint64_t footprint_bytes(const GeneratorConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
        case WorkloadKind::DataLocality: return cfg.x * cfg.element_stride;
        case WorkloadKind::InstructionLocality: return cfg.x * cfg.function_stride;
        case WorkloadKind::BranchLocality: return 0;  // a single branch site
    }
    throw ParameterError("unknown workload kind");
}

CalibrationResult select_calibration(std::vector<CalibrationRow> table, double threshold) {
    CalibrationResult result;
    result.threshold = threshold;
    for (auto& row : table) {
        row.qualifies = row.rel_error < threshold;
        // Ascending candidates: the first qualifying x also has the best
        // locality among qualifying ones.
        if (row.qualifies && !result.chosen_x) result.chosen_x = row.x;
    }
    result.table = std::move(table);
    return result;
}

CalibrationResult calibrate_x(WorkloadKind kind, std::span<const std::uint64_t> candidate_xs,
                              std::uint64_t seed, const CalibrationOptions& opts) {
    if (candidate_xs.empty()) throw ParameterError("calibration needs at least one candidate x");
    if (!std::is_sorted(candidate_xs.begin(), candidate_xs.end()) ||
        std::adjacent_find(candidate_xs.begin(), candidate_xs.end()) != candidate_xs.end())
        throw ParameterError("calibration candidates must be strictly ascending");

    std::vector<CalibrationRow> table;
    table.reserve(candidate_xs.size());
    for (std::size_t i = 0; i < candidate_xs.size(); ++i) {
        GeneratorConfig cfg;
        cfg.kind = kind;
        cfg.x = candidate_xs[i];
        cfg.iterations = opts.iterations;
        cfg.body_instructions = opts.body_instructions;
        cfg.harness_instructions = opts.harness_instructions;
        cfg.branch_range = opts.branch_range;
        cfg.level = opts.level;
        cfg.seed = derive_seed(seed, i);

        const Trace trace = generate(cfg);
        MetricObservation obs;
        switch (kind) {
            case WorkloadKind::DataLocality: obs = data_reuse_distance(trace); break;
            case WorkloadKind::InstructionLocality: obs = instruction_reuse_distance(trace); break;
            case WorkloadKind::BranchLocality: obs = branch_entropy(trace).first; break;
        }

        CalibrationRow row;
        row.x = cfg.x;
        row.predicted = theoretical_prediction(cfg);
        row.measured = obs.defined ? obs.value : 0.0;
        if (row.predicted > 0) {
            row.rel_error = std::abs(row.measured - row.predicted) / row.predicted;
        } else {
            row.rel_error = row.measured == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        table.push_back(row);
    }
    return select_calibration(std::move(table), opts.threshold);
}

}  // namespace wpc
