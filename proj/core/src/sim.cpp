#include "wpc/sim.hpp"

#include <algorithm>
#include <bit>

#include "wpc/error.hpp"

namespace wpc {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void CacheConfig::validate() const {
    if (!is_pow2(line_bytes)) throw ParameterError("cache line size must be a power of two");
    if (associativity < 1) throw ParameterError("associativity must be >= 1");
    if (capacity_bytes < std::uint64_t(line_bytes) * associativity)
        throw ParameterError("cache capacity below one set (line_bytes * associativity)");
    if (capacity_bytes % (std::uint64_t(line_bytes) * associativity) != 0 || !is_pow2(sets()))
        throw ParameterError("cache set count must be a power of two");
}

void PredictorConfig::validate() const {
    if (!is_pow2(table_entries)) throw ParameterError("predictor table entries must be a power of two");
}

double SimResult::l1i_mpki() const {
    return instructions ? double(l1i_misses) * 1000.0 / double(instructions) : 0.0;
}
double SimResult::l1d_mpki() const {
    return instructions ? double(l1d_misses) * 1000.0 / double(instructions) : 0.0;
}
double SimResult::branch_mpki() const {
    return instructions ? double(branch_mispredictions) * 1000.0 / double(instructions) : 0.0;
}

SetAssocCache::SetAssocCache(const CacheConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    set_mask_ = cfg_.sets() - 1;
    line_shift_ = std::uint32_t(std::countr_zero(std::uint64_t(cfg_.line_bytes)));
    sets_.resize(cfg_.sets());
    for (auto& set : sets_) set.reserve(cfg_.associativity);
}

void SetAssocCache::install_lru(std::uint64_t line) {
    auto& set = sets_[line & set_mask_];
    if (std::find(set.begin(), set.end(), line) != set.end()) return;
    if (set.size() == cfg_.associativity) set.erase(set.begin());
    set.insert(set.begin(), line);
}

bool SetAssocCache::access(std::uint64_t addr) {
    const std::uint64_t line = addr >> line_shift_;
    auto& set = sets_[line & set_mask_];
    ++accesses_;
    const auto it = std::find(set.begin(), set.end(), line);
    if (it != set.end()) {
        set.erase(it);
        set.push_back(line);  // promote to MRU
        return false;
    }
    ++misses_;
    if (set.size() == cfg_.associativity) set.erase(set.begin());
    set.push_back(line);
    if (cfg_.prefetch_next_line) install_lru(line + 1);
    return true;
}

BimodalPredictor::BimodalPredictor(const PredictorConfig& cfg) {
    cfg.validate();
    table_.assign(cfg.table_entries, 1);  // weakly not-taken
    index_mask_ = cfg.table_entries - 1;
}

bool BimodalPredictor::predict_and_train(std::uint64_t instr_addr, bool taken) {
    std::uint8_t& counter = table_[(instr_addr >> 2) & index_mask_];
    const bool predicted_taken = counter >= 2;
    const bool mispredicted = predicted_taken != taken;
    ++branches_;
    if (mispredicted) ++mispredictions_;
    if (taken) {
        if (counter < 3) ++counter;
    } else {
        if (counter > 0) --counter;
    }
    return mispredicted;
}

Simulation::Simulation(const CacheConfig& l1i, const CacheConfig& l1d, const PredictorConfig& pred,
                       std::string config_label)
    : l1i_(l1i), l1d_(l1d), predictor_(pred), config_label_(std::move(config_label)) {}

void Simulation::step(const TraceEvent& event) {
    ++instructions_;
    l1i_.access(event.instr_addr);
    if (event.kind == EventKind::Load || event.kind == EventKind::Store)
        l1d_.access(event.data_or_target_addr);
    else if (event.kind == EventKind::Branch)
        predictor_.predict_and_train(event.instr_addr, event.taken);
}

SimResult Simulation::result() const {
    SimResult r;
    r.config_label = config_label_;
    r.instructions = instructions_;
    r.l1i_accesses = l1i_.accesses();
    r.l1i_misses = l1i_.misses();
    r.l1d_accesses = l1d_.accesses();
    r.l1d_misses = l1d_.misses();
    r.branches = predictor_.branches();
    r.branch_mispredictions = predictor_.mispredictions();
    return r;
}

SimResult simulate(const Trace& trace, const CacheConfig& l1i, const CacheConfig& l1d,
                   const PredictorConfig& pred, std::string config_label) {
    Simulation sim(l1i, l1d, pred, std::move(config_label));
    for (const TraceEvent& e : trace.events) sim.step(e);
    return sim.result();
}

PlatformPreset platform_preset(std::string_view name) {
    PlatformPreset preset;
    if (name == "gold5120t-like") {
        preset.name = "gold5120t-like";
        preset.l1i = CacheConfig{32 * 1024, 64, 8, false};
        preset.l1d = CacheConfig{32 * 1024, 64, 8, false};
        return preset;
    }
    if (name == "kunpeng920-like") {
        preset.name = "kunpeng920-like";
        preset.l1i = CacheConfig{64 * 1024, 64, 8, false};
        preset.l1d = CacheConfig{64 * 1024, 64, 8, false};
        return preset;
    }
    std::string known;
    for (const auto& n : platform_preset_names()) {
        if (!known.empty()) known += ", ";
        known += n;
    }
    throw ParameterError("unknown platform preset '" + std::string(name) + "' (known: " + known +
                         ")");
}

std::vector<std::string> platform_preset_names() { return {"gold5120t-like", "kunpeng920-like"}; }

KneeResult detect_knee(std::span<const SweepPoint> sweep, double theta) {
    if (sweep.size() < 4) throw ParameterError("knee detection needs at least 4 sweep points");
    if (theta <= 1.0) throw ParameterError("theta must be > 1");
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i].x <= sweep[i - 1].x)
            throw ParameterError("sweep points must have strictly ascending x");
    }
    KneeResult result;
    result.theta = theta;
    result.floor_mpki = sweep[0].mpki;
    for (const auto& p : sweep) result.floor_mpki = std::min(result.floor_mpki, p.mpki);
    const double limit = theta * result.floor_mpki;
    bool saturated = false;
    for (const auto& p : sweep) {
        if (p.mpki > limit) saturated = true;
    }
    if (!saturated) return result;  // cache never saturated: no knee
    for (const auto& p : sweep) {
        if (p.mpki <= limit) result.knee_x = p.x;
    }
    return result;
}

std::vector<SimResult> config_sweep(const Trace& trace, std::span<const SimVariant> variants) {
    if (variants.empty()) throw ParameterError("config sweep needs at least one variant");
    std::vector<SimResult> results;
    results.reserve(variants.size());
    for (const SimVariant& v : variants)
        results.push_back(simulate(trace, v.l1i, v.l1d, v.predictor, v.config_label));
    return results;
}

}  // namespace wpc
