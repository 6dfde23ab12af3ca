#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpc/metrics.hpp"
#include "wpc/trace.hpp"

namespace wpc {

// One level's observed value X and reference value S.
struct LevelSample {
    Level level = Level::IR;
    double observed = 0;   // X_i >= 0
    double reference = 0;  // S_i > 0
};

// Per-level samples, distinct ascending levels, length >= 2.
struct MetricVector {
    std::vector<LevelSample> levels;
    void validate() const;
};

struct ImpactLevel {
    Level level = Level::IR;
    double relative = 0;  // R_i = X_i / S_i
    double impact = 0;    // I_i = R_i / sum(R)
};

struct ImpactVector {
    std::vector<ImpactLevel> levels;
};

// R_i = X_i/S_i, I_i = R_i / sum R. Throws ParameterError naming the level
// on S_i <= 0, DegenerateInputError when every observation is zero.
ImpactVector impact_factors(const MetricVector& v);

// Builds a MetricVector from stored observations of one family; both sides
// must be defined at each shared level. Throws ParameterError naming the
// level of any undefined or invalid entry, MissingDataError when fewer than
// two levels are shared.
MetricVector make_metric_vector(std::span<const MetricObservation> observed,
                                std::span<const MetricObservation> reference);

// Sample Pearson correlation. Requires equal lengths >= 2; throws
// UndefinedCorrelationError on zero variance. Result clamped to [-1, 1].
double pearson(std::span<const double> xs, std::span<const double> ys);

enum class BreakdownMethod : std::uint8_t { TagShare, Differential, Residual };

const char* to_string(BreakdownMethod method);
BreakdownMethod breakdown_method_from_string(std::string_view name);

// Hierarchical attribution node. Children impacts sum to the parent impact.
// method describes how this node's impact was split off its parent; nodes
// whose impact came straight from normalization carry no method.
struct BreakdownNode {
    std::string name;
    double impact = 0;
    std::optional<BreakdownMethod> method;
    std::vector<BreakdownNode> children;
};

// Splits parent_impact across tags by reuse-gap mass (reuse metrics) or
// execution-weighted entropy mass (BranchEntropy). Gaps are attributed to
// the tag of the reusing event. A trace with no second tag in use yields a
// single child carrying the full parent.
std::vector<BreakdownNode> breakdown_by_tags(const Trace& trace, Metric metric,
                                             double parent_impact);

struct DifferentialBreakdown {
    BreakdownNode component;  // method Differential
    BreakdownNode residual;   // method Residual
    bool ablation_worsened = false;  // ablated > full; share clamped to 0
};

// Attribution by ablation: component share = (full - ablated)/full, clamped
// to [0, 1]. Requires matching metric and level, full.value > 0.
DifferentialBreakdown breakdown_differential(const MetricObservation& full,
                                             const MetricObservation& ablated,
                                             double parent_impact,
                                             std::string component_name,
                                             std::string residual_name = "residual");

struct KernelShare {
    double reported = 0;  // 0 when raw <= 0.001
    double raw = 0;
};

// Fraction of reuse-gap (or entropy) mass attributed to kernel-mode events.
// Shares at or below 0.001 are reported as zero, raw value retained.
KernelShare kernel_noise_share(const Trace& trace, Metric metric = Metric::InstrReuseDist);

struct MpkiRow {
    std::string name;
    double impact = 0;
    double normalized_mpki = 0;  // impact * mpki
};

// Rows sum to the input mpki (for a tree, leaves are the components).
std::vector<MpkiRow> normalized_mpki_breakdown(const ImpactVector& impacts, double mpki);
std::vector<MpkiRow> normalized_mpki_breakdown(const BreakdownNode& root, double mpki);

// Presentation rounding used by reports (one decimal by default).
double present_round(double value, int decimals = 1);

}  // namespace wpc
