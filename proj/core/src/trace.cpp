#include "wpc/trace.hpp"

#include <limits>

#include "wpc/error.hpp"

namespace wpc {

const char* to_string(Level level) {
    switch (level) {
        case Level::IR: return "IR";
        case Level::ISA: return "ISA";
        case Level::UARCH: return "UARCH";
    }
    return "?";
}

Level level_from_string(std::string_view name) {
    if (name == "IR") return Level::IR;
    if (name == "ISA") return Level::ISA;
    if (name == "UARCH") return Level::UARCH;
    throw ParameterError("unknown level: " + std::string(name));
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Compute: return "Compute";
        case EventKind::Load: return "Load";
        case EventKind::Store: return "Store";
        case EventKind::Branch: return "Branch";
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view name) {
    if (name == "Compute") return EventKind::Compute;
    if (name == "Load") return EventKind::Load;
    if (name == "Store") return EventKind::Store;
    if (name == "Branch") return EventKind::Branch;
    throw ParameterError("unknown event kind: " + std::string(name));
}

void Trace::validate() const {
    constexpr std::size_t kMaxName = std::numeric_limits<std::uint16_t>::max();
    if (workload_name.size() > kMaxName)
        throw ParameterError("workload name exceeds 65535 bytes");
    if (tag_table.size() > kMaxName)
        throw ParameterError("tag table exceeds 65535 entries");
    for (const auto& tag : tag_table) {
        if (tag.size() > kMaxName)
            throw ParameterError("tag name exceeds 65535 bytes");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        const TraceEvent& e = events[i];
        if (e.tag_id >= tag_table.size())
            throw ParameterError("event " + std::to_string(i) + " references tag " +
                                 std::to_string(e.tag_id) + " outside the tag table");
        if (e.kind == EventKind::Compute && e.data_or_target_addr != 0)
            throw ParameterError("event " + std::to_string(i) +
                                 " is Compute with a nonzero data address");
    }
}

}  // namespace wpc
