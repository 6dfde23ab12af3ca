#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpc/trace.hpp"

namespace wpc {

struct CacheConfig {
    std::uint64_t capacity_bytes = 32 * 1024;
    std::uint32_t line_bytes = 64;       // power of two
    std::uint32_t associativity = 8;     // ways per set
    bool prefetch_next_line = false;

    std::uint64_t sets() const { return capacity_bytes / (std::uint64_t(line_bytes) * associativity); }
    void validate() const;  // capacity/line powers of two, sets a power of two >= 1
};

struct PredictorConfig {
    std::uint32_t table_entries = 4096;  // power of two
    void validate() const;
};

struct SimResult {
    std::string config_label;
    std::uint64_t instructions = 0;
    std::uint64_t l1i_accesses = 0;
    std::uint64_t l1i_misses = 0;
    std::uint64_t l1d_accesses = 0;
    std::uint64_t l1d_misses = 0;
    std::uint64_t branches = 0;
    std::uint64_t branch_mispredictions = 0;

    double l1i_mpki() const;
    double l1d_mpki() const;
    double branch_mpki() const;

    bool operator==(const SimResult&) const = default;
};

// Set-associative cache, LRU per set. Optional next-line prefetch: a demand
// miss also installs line+1, at LRU priority, counted as neither access nor
// miss.
class SetAssocCache {
public:
    explicit SetAssocCache(const CacheConfig& cfg);

    // Returns true on a demand miss; updates LRU state and prefetches.
    bool access(std::uint64_t addr);

    std::uint64_t accesses() const { return accesses_; }
    std::uint64_t misses() const { return misses_; }

private:
    void install_lru(std::uint64_t line);

    CacheConfig cfg_;
    std::uint64_t set_mask_;
    std::uint32_t line_shift_;
    std::vector<std::vector<std::uint64_t>> sets_;  // per set, LRU at front, MRU at back
    std::uint64_t accesses_ = 0;
    std::uint64_t misses_ = 0;
};

// Bimodal table of 2-bit saturating counters, initialized weakly-not-taken.
// Indexed by (instr_addr / 4) mod table_entries.
class BimodalPredictor {
public:
    explicit BimodalPredictor(const PredictorConfig& cfg);

    // Predicts, then trains with the outcome; returns true on mispredict.
    bool predict_and_train(std::uint64_t instr_addr, bool taken);

    std::uint64_t branches() const { return branches_; }
    std::uint64_t mispredictions() const { return mispredictions_; }

private:
    std::vector<std::uint8_t> table_;
    std::uint64_t index_mask_;
    std::uint64_t branches_ = 0;
    std::uint64_t mispredictions_ = 0;
};

// Mutable per-run state; feed events in order, then take the result.
class Simulation {
public:
    Simulation(const CacheConfig& l1i, const CacheConfig& l1d, const PredictorConfig& pred,
               std::string config_label = "default");

    void step(const TraceEvent& event);
    SimResult result() const;

private:
    SetAssocCache l1i_;
    SetAssocCache l1d_;
    BimodalPredictor predictor_;
    std::string config_label_;
    std::uint64_t instructions_ = 0;
};

// Every event fetches one instruction through L1I; Load/Store additionally
// access L1D; Branch consults and updates the predictor. Caches start cold,
// the predictor weakly-not-taken. Deterministic.
SimResult simulate(const Trace& trace, const CacheConfig& l1i, const CacheConfig& l1d,
                   const PredictorConfig& pred, std::string config_label = "default");

struct PlatformPreset {
    std::string name;
    CacheConfig l1i;
    CacheConfig l1d;
    PredictorConfig predictor;
};

// "gold5120t-like": 32KB/64B/8-way L1I+L1D. "kunpeng920-like": 64KB L1I+L1D.
// Prefetch defaults to off in both.
PlatformPreset platform_preset(std::string_view name);
std::vector<std::string> platform_preset_names();

struct SweepPoint {
    std::uint64_t x = 0;
    double mpki = 0;
};

struct KneeResult {
    std::optional<std::uint64_t> knee_x;  // empty when the cache never saturated
    double floor_mpki = 0;
    double theta = 5.0;
};

// floor = min mpki over the sweep; the knee is the largest x still within
// theta*floor. Requires >= 4 points with ascending x.
KneeResult detect_knee(std::span<const SweepPoint> sweep, double theta = 5.0);

struct SimVariant {
    std::string config_label;
    CacheConfig l1i;
    CacheConfig l1d;
    PredictorConfig predictor;
};

// One simulation per variant over the same trace.
std::vector<SimResult> config_sweep(const Trace& trace, std::span<const SimVariant> variants);

}  // namespace wpc
