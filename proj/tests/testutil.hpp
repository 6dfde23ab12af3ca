#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wpc/trace.hpp"

namespace wpc::test {

// Independent reference implementations. These stay naive on purpose: they
// are the oracles the fast single-pass code is checked against.

struct NaiveReuse {
    double mean = 0;
    std::uint64_t gap_count = 0;
    std::map<std::uint64_t, std::vector<std::uint64_t>> positions;  // key -> indices
};

// Two-pass reference: collect every occurrence index per address, then form
// gaps between consecutive occurrences.
inline NaiveReuse naive_instruction_reuse(const std::vector<TraceEvent>& events) {
    NaiveReuse out;
    std::uint64_t index = 0;
    for (const auto& e : events) out.positions[e.instr_addr].push_back(index++);
    std::uint64_t sum = 0;
    for (const auto& [addr, pos] : out.positions) {
        for (std::size_t i = 1; i < pos.size(); ++i) {
            sum += pos[i] - pos[i - 1];
            ++out.gap_count;
        }
    }
    out.mean = out.gap_count ? double(sum) / double(out.gap_count) : 0.0;
    return out;
}

inline NaiveReuse naive_data_reuse(const std::vector<TraceEvent>& events) {
    NaiveReuse out;
    std::uint64_t index = 0;
    for (const auto& e : events) {
        if (e.kind != EventKind::Load && e.kind != EventKind::Store) continue;
        out.positions[e.data_or_target_addr].push_back(index++);
    }
    std::uint64_t sum = 0;
    for (const auto& [addr, pos] : out.positions) {
        for (std::size_t i = 1; i < pos.size(); ++i) {
            sum += pos[i] - pos[i - 1];
            ++out.gap_count;
        }
    }
    out.mean = out.gap_count ? double(sum) / double(out.gap_count) : 0.0;
    return out;
}

// Gap histogram over Load events (data addresses), brute force.
inline std::map<std::uint64_t, std::uint64_t> naive_data_gap_histogram(
    const std::vector<TraceEvent>& events) {
    std::map<std::uint64_t, std::uint64_t> hist;
    std::vector<std::uint64_t> loads;
    for (const auto& e : events)
        if (e.kind == EventKind::Load || e.kind == EventKind::Store)
            loads.push_back(e.data_or_target_addr);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        for (std::size_t j = i + 1; j < loads.size(); ++j) {
            if (loads[j] == loads[i]) {
                ++hist[j - i];
                break;
            }
        }
    }
    return hist;
}

// Steady-state misprediction rate of a 2-bit saturating counter fed i.i.d.
// Bernoulli(p) outcomes: p*q / (p^2 + q^2).
inline double bimodal_iid_rate(double p) {
    const double q = 1.0 - p;
    return p * q / (p * p + q * q);
}

// Deterministic random traces for property tests.
inline Trace random_trace(std::uint64_t seed, std::size_t n_events, std::size_t n_addrs = 64,
                          std::size_t n_tags = 3) {
    std::mt19937_64 rng(seed);
    Trace trace;
    trace.workload_name = "random-" + std::to_string(seed);
    trace.tag_table.push_back("untagged");
    for (std::size_t t = 1; t < n_tags; ++t) trace.tag_table.push_back("tag" + std::to_string(t));
    std::uniform_int_distribution<std::uint64_t> addr(0, n_addrs - 1);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::uint16_t> tag(0, std::uint16_t(n_tags - 1));
    for (std::size_t i = 0; i < n_events; ++i) {
        TraceEvent e;
        e.kind = EventKind(kind(rng));
        e.instr_addr = 0x1000 + 4 * addr(rng);
        if (e.kind != EventKind::Compute) e.data_or_target_addr = 0x80000 + 8 * addr(rng);
        e.taken = e.kind == EventKind::Branch && coin(rng);
        e.kernel_mode = coin(rng) == 0 && (i % 16 == 0);
        e.tag_id = tag(rng);
        trace.events.push_back(e);
    }
    return trace;
}

class TempDir {
public:
    explicit TempDir(const std::string& prefix) {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        path_ = base / (prefix + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace wpc::test
