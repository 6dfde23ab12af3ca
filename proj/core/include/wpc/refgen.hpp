#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wpc/trace.hpp"

namespace wpc {

enum class WorkloadKind : std::uint8_t { DataLocality, InstructionLocality, BranchLocality };

const char* to_string(WorkloadKind kind);
WorkloadKind workload_kind_from_string(std::string_view name);

// Fixed address layout of generated traces. Harness instructions sit in the
// 256 bytes below the code base, so harness_instructions is capped at 64.
inline constexpr std::uint64_t kDataBase = 0x1000'0000ull;
inline constexpr std::uint64_t kCodeBase = 0x40'0000ull;
inline constexpr std::uint64_t kHarnessBase = kCodeBase - 256;
inline constexpr std::uint64_t kBranchTargetAddr = kCodeBase + 0x100;

// Parameters of a reference workload. `x` is the controlled parameter: the
// data span (distinct elements), the function count, or the taken threshold,
// depending on the kind.
struct GeneratorConfig {
    WorkloadKind kind = WorkloadKind::DataLocality;
    std::uint64_t x = 1;
    std::uint64_t iterations = 1;
    std::uint32_t body_instructions = 5;   // instructions per function body
    std::uint32_t harness_instructions = 2;  // fixed loop-overhead events per iteration
    std::uint64_t branch_range = 1000;     // threshold range bound for BranchLocality
    std::uint64_t element_stride = 8;      // bytes between data elements
    std::uint64_t function_stride = 32;    // bytes between function entry points
    std::uint64_t seed = 0;
    Level level = Level::IR;

    void validate() const;
};

// Emits the configured reference workload as a trace. Event order per
// iteration: harness Compute events at fixed addresses, then the payload
// (one Load, one function body, or one Branch). Deterministic for a fixed
// config; every event runs in user mode. Harness events carry tag 1,
// payload events tag 2.
Trace generate(const GeneratorConfig& cfg);
Trace generate_data_locality(const GeneratorConfig& cfg);
Trace generate_instruction_locality(const GeneratorConfig& cfg);
Trace generate_branch_locality(const GeneratorConfig& cfg);

// Closed-form locality prediction: x, x*b, or 2*min(x/m, 1-x/m).
double theoretical_prediction(const GeneratorConfig& cfg);

// Bytes the payload touches: x * stride (data and instruction kinds only).
std::uint64_t footprint_bytes(const GeneratorConfig& cfg);

struct CalibrationRow {
    std::uint64_t x = 0;
    double predicted = 0;
    double measured = 0;
    double rel_error = 0;
    bool qualifies = false;
};

struct CalibrationResult {
    std::vector<CalibrationRow> table;
    std::optional<std::uint64_t> chosen_x;  // empty when no candidate qualifies
    double threshold = 0.02;
};

struct CalibrationOptions {
    double threshold = 0.02;
    std::uint64_t iterations = 1'000'000;
    std::uint32_t body_instructions = 5;
    std::uint32_t harness_instructions = 2;
    std::uint64_t branch_range = 1000;
    Level level = Level::IR;
};

// Selection rule shared by measured and ingested error tables: the smallest
// candidate whose relative error is under the threshold also has the best
// locality among qualifying candidates, so it wins.
CalibrationResult select_calibration(std::vector<CalibrationRow> table, double threshold);

// Generates and measures each candidate (per-candidate seed derived from
// `seed` and the candidate index), compares against the closed-form
// prediction, and selects. candidate_xs must be non-empty and ascending.
CalibrationResult calibrate_x(WorkloadKind kind, std::span<const std::uint64_t> candidate_xs,
                              std::uint64_t seed, const CalibrationOptions& opts = {});

}  // namespace wpc
