#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpc {

// Characterization levels, ordered IR < ISA < UARCH.
enum class Level : std::uint8_t { IR = 0, ISA = 1, UARCH = 2 };

const char* to_string(Level level);
Level level_from_string(std::string_view name);

enum class EventKind : std::uint8_t { Compute = 0, Load = 1, Store = 2, Branch = 3 };

const char* to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

// One executed instruction. data_or_target_addr holds the data address for
// Load/Store, the branch target for Branch, and must be 0 for Compute.
struct TraceEvent {
    std::uint64_t instr_addr = 0;
    std::uint64_t data_or_target_addr = 0;
    std::uint16_t tag_id = 0;
    EventKind kind = EventKind::Compute;
    bool taken = false;        // meaningful only for Branch
    bool kernel_mode = false;  // privilege flag for OS-noise attribution

    bool operator==(const TraceEvent&) const = default;
};

// Ordered event sequence at one level. Tag 0 is reserved for "untagged".
// Immutable after construction; safe to share across concurrent readers.
struct Trace {
    Level level = Level::IR;
    std::string workload_name;
    std::vector<std::string> tag_table;
    std::vector<TraceEvent> events;
    std::optional<std::uint64_t> seed;  // present for synthetic traces

    // Throws ParameterError on any invariant violation (dangling tag_id,
    // Compute event with a nonzero data address, oversized string fields).
    void validate() const;

    bool operator==(const Trace&) const = default;
};

// One row of ingested hardware-counter data.
struct CounterRecord {
    std::string workload_name;
    std::uint64_t instructions = 0;  // must be > 0
    std::uint64_t l1i_misses = 0;
    std::uint64_t l1d_misses = 0;
    std::uint64_t branch_mispredictions = 0;
    std::string config_label;

    bool operator==(const CounterRecord&) const = default;
};

}  // namespace wpc
