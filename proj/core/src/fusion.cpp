#include "wpc/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "wpc/error.hpp"

namespace wpc {

const char* to_string(BreakdownMethod method) {
    switch (method) {
        case BreakdownMethod::TagShare: return "TagShare";
        case BreakdownMethod::Differential: return "Differential";
        case BreakdownMethod::Residual: return "Residual";
    }
    return "?";
}

BreakdownMethod breakdown_method_from_string(std::string_view name) {
    if (name == "TagShare") return BreakdownMethod::TagShare;
    if (name == "Differential") return BreakdownMethod::Differential;
    if (name == "Residual") return BreakdownMethod::Residual;
    throw ParameterError("unknown breakdown method: " + std::string(name));
}

void MetricVector::validate() const {
    if (levels.size() < 2) throw ParameterError("metric vector needs at least 2 levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const LevelSample& s = levels[i];
        if (i > 0 && !(std::uint8_t(levels[i - 1].level) < std::uint8_t(s.level)))
            throw ParameterError("metric vector levels must be distinct and ascending");
        if (!(s.reference > 0))
            throw ParameterError(std::string("invalid reference value at level ") +
                                 to_string(s.level) + ": must be > 0");
        if (s.observed < 0)
            throw ParameterError(std::string("negative observed value at level ") +
                                 to_string(s.level));
    }
}

ImpactVector impact_factors(const MetricVector& v) {
    v.validate();
    ImpactVector out;
    out.levels.reserve(v.levels.size());
    double sum = 0;
    for (const LevelSample& s : v.levels) {
        const double relative = s.observed / s.reference;
        out.levels.push_back({s.level, relative, 0.0});
        sum += relative;
    }
    if (sum == 0)
        throw DegenerateInputError("all observed values are zero: impact factors are undefined");
    for (ImpactLevel& l : out.levels) l.impact = l.relative / sum;
    return out;
}

MetricVector make_metric_vector(std::span<const MetricObservation> observed,
                                std::span<const MetricObservation> reference) {
    MetricVector v;
    for (const MetricObservation& obs : observed) {
        for (const MetricObservation& ref : reference) {
            if (ref.level != obs.level) continue;
            if (!obs.defined)
                throw ParameterError(std::string("observed metric undefined at level ") +
                                     to_string(obs.level));
            if (!ref.defined)
                throw ParameterError(std::string("reference metric undefined at level ") +
                                     to_string(ref.level));
            v.levels.push_back({obs.level, obs.value, ref.value});
        }
    }
    std::sort(v.levels.begin(), v.levels.end(), [](const LevelSample& a, const LevelSample& b) {
        return std::uint8_t(a.level) < std::uint8_t(b.level);
    });
    if (v.levels.size() < 2)
        throw MissingDataError("fewer than 2 levels shared between observed and reference");
    v.validate();
    return v;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ParameterError("pearson inputs differ in length");
    if (xs.size() < 2) throw ParameterError("pearson needs at least 2 points");
    const double n = double(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0) throw UndefinedCorrelationError("first series has zero variance");
    if (syy == 0) throw UndefinedCorrelationError("second series has zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// Attribution masses for one trace and metric: reuse-gap mass for the reuse
// metrics, execution-weighted entropy mass for BranchEntropy, keyed by the
// tag (and privilege flag) of the reusing/executing event.
struct AttributionMass {
    std::map<std::uint16_t, double> per_tag;
    double kernel = 0;
    double total = 0;
};

AttributionMass reuse_gap_mass(const Trace& trace, bool data_metric) {
    AttributionMass mass;
    std::unordered_map<std::uint64_t, std::uint64_t> last_index;
    std::uint64_t index = 0;
    for (const TraceEvent& e : trace.events) {
        if (data_metric && e.kind != EventKind::Load && e.kind != EventKind::Store) continue;
        const std::uint64_t key = data_metric ? e.data_or_target_addr : e.instr_addr;
        const auto [it, fresh] = last_index.try_emplace(key, index);
        if (!fresh) {
            const double gap = double(index - it->second);
            mass.per_tag[e.tag_id] += gap;
            if (e.kernel_mode) mass.kernel += gap;
            mass.total += gap;
            it->second = index;
        }
        ++index;
    }
    return mass;
}

AttributionMass entropy_mass(const Trace& trace) {
    AttributionMass mass;
    std::unordered_map<std::uint64_t, BranchSiteStats> sites;
    for (const TraceEvent& e : trace.events) {
        if (e.kind != EventKind::Branch) continue;
        BranchSiteStats& s = sites[e.instr_addr];
        s.taken += e.taken ? 1 : 0;
        s.total += 1;
    }
    for (const TraceEvent& e : trace.events) {
        if (e.kind != EventKind::Branch) continue;
        const double h = sites[e.instr_addr].entropy();
        mass.per_tag[e.tag_id] += h;
        if (e.kernel_mode) mass.kernel += h;
        mass.total += h;
    }
    return mass;
}

AttributionMass attribution_mass(const Trace& trace, Metric metric) {
    switch (metric) {
        case Metric::InstrReuseDist: return reuse_gap_mass(trace, false);
        case Metric::DataReuseDist: return reuse_gap_mass(trace, true);
        case Metric::BranchEntropy: return entropy_mass(trace);
        default:
            throw ParameterError("tag attribution needs a trace-level metric, got " +
                                 std::string(to_string(metric)));
    }
}

std::string tag_name(const Trace& trace, std::uint16_t tag_id) {
    if (tag_id < trace.tag_table.size()) return trace.tag_table[tag_id];
    return "tag-" + std::to_string(tag_id);
}

}  // namespace

std::vector<BreakdownNode> breakdown_by_tags(const Trace& trace, Metric metric,
                                             double parent_impact) {
    if (parent_impact < 0 || parent_impact > 1)
        throw ParameterError("parent impact must be in [0, 1]");
    const AttributionMass mass = attribution_mass(trace, metric);
    std::vector<BreakdownNode> children;
    if (mass.total == 0) {
        children.push_back({tag_name(trace, 0), parent_impact, BreakdownMethod::TagShare, {}});
        return children;
    }
    for (const auto& [tag, m] : mass.per_tag) {
        if (m == 0) continue;
        children.push_back(
            {tag_name(trace, tag), parent_impact * (m / mass.total), BreakdownMethod::TagShare, {}});
    }
    return children;
}

DifferentialBreakdown breakdown_differential(const MetricObservation& full,
                                             const MetricObservation& ablated,
                                             double parent_impact, std::string component_name,
                                             std::string residual_name) {
    if (full.metric != ablated.metric)
        throw ParameterError("differential breakdown needs matching metrics");
    if (full.level != ablated.level)
        throw ParameterError("differential breakdown needs matching levels");
    if (!full.defined || !ablated.defined)
        throw ParameterError("differential breakdown needs defined observations");
    if (!(full.value > 0)) throw ParameterError("differential breakdown needs full.value > 0");
    if (parent_impact < 0 || parent_impact > 1)
        throw ParameterError("parent impact must be in [0, 1]");

    DifferentialBreakdown out;
    double share = (full.value - ablated.value) / full.value;
    if (share < 0) {
        share = 0;
        out.ablation_worsened = true;
    }
    out.component = {std::move(component_name), parent_impact * share,
                     BreakdownMethod::Differential, {}};
    out.residual = {std::move(residual_name), parent_impact * (1.0 - share),
                    BreakdownMethod::Residual, {}};
    return out;
}

KernelShare kernel_noise_share(const Trace& trace, Metric metric) {
    const AttributionMass mass = attribution_mass(trace, metric);
    KernelShare share;
    share.raw = mass.total > 0 ? mass.kernel / mass.total : 0.0;
    share.reported = share.raw <= 0.001 ? 0.0 : share.raw;
    return share;
}

std::vector<MpkiRow> normalized_mpki_breakdown(const ImpactVector& impacts, double mpki) {
    if (mpki < 0) throw ParameterError("mpki must be >= 0");
    std::vector<MpkiRow> rows;
    rows.reserve(impacts.levels.size());
    for (const ImpactLevel& l : impacts.levels)
        rows.push_back({to_string(l.level), l.impact, l.impact * mpki});
    return rows;
}

namespace {

void collect_leaves(const BreakdownNode& node, double mpki, std::vector<MpkiRow>& rows) {
    if (node.children.empty()) {
        rows.push_back({node.name, node.impact, node.impact * mpki});
        return;
    }
    for (const BreakdownNode& child : node.children) collect_leaves(child, mpki, rows);
}

}  // namespace

std::vector<MpkiRow> normalized_mpki_breakdown(const BreakdownNode& root, double mpki) {
    if (mpki < 0) throw ParameterError("mpki must be >= 0");
    std::vector<MpkiRow> rows;
    collect_leaves(root, mpki, rows);
    return rows;
}

double present_round(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

}  // namespace wpc
