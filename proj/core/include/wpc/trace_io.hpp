#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wpc/trace.hpp"

namespace wpc {

// Binary trace format, little-endian throughout:
//   magic "WPC1" | version u16 | level u8 | reserved u8
//   | name len u16 + bytes | tag count u16 + per tag (len u16 + bytes)
//   | seed present u8 (+ seed u64) | event count u64 | event records.
// Event record, fixed 20 bytes:
//   kind u8 | flags u8 (bit0 taken, bit1 kernel_mode) | tag_id u16
//   | instr_addr u64 | data_or_target_addr u64.
inline constexpr std::array<char, 4> kTraceMagic = {'W', 'P', 'C', '1'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kEventRecordSize = 20;

// Header fields without the event payload.
struct TraceHeader {
    Level level = Level::IR;
    std::string workload_name;
    std::vector<std::string> tag_table;
    std::optional<std::uint64_t> seed;
    std::uint64_t event_count = 0;
};

// Writes the binary format; returns bytes written. Two writes of the same
// trace produce identical bytes. Throws IoError (with byte position) on sink
// failure, ParameterError if the trace violates its invariants.
std::uint64_t write_trace(const Trace& trace, std::ostream& out);
void write_trace_file(const Trace& trace, const std::filesystem::path& path);

// Incremental reader; events are consumed one at a time without
// materializing the whole trace. Single pass per stream.
class TraceReader {
public:
    explicit TraceReader(std::istream& in);

    const TraceHeader& header() const { return header_; }

    // Fills `event` and returns true, or returns false after the last event.
    // Throws CorruptionError (with the event index) on a truncated record,
    // FormatError on an unknown kind byte or unresolvable tag.
    bool next(TraceEvent& event);

    std::uint64_t events_read() const { return read_; }

private:
    std::istream& in_;
    TraceHeader header_;
    std::uint64_t read_ = 0;
};

Trace read_trace(std::istream& in);
Trace read_trace_file(const std::filesystem::path& path);

// JSON-lines mirror of the binary format, field for field: one header object
// followed by one object per event. Binary is canonical; this is for eyes.
std::uint64_t write_trace_jsonl(const Trace& trace, std::ostream& out);
Trace read_trace_jsonl(std::istream& in);
void write_trace_jsonl_file(const Trace& trace, const std::filesystem::path& path);
Trace read_trace_jsonl_file(const std::filesystem::path& path);

// Counter CSV with header
//   workload,instructions,l1i_misses,l1d_misses,branch_mispredictions,config
// Columns may be reordered; unknown columns are ignored; blank lines are
// skipped. Throws SchemaError naming a missing column, ParseError (with
// 1-based line number) on malformed counts or instructions == 0.
std::vector<CounterRecord> read_counters(std::istream& in);
std::vector<CounterRecord> read_counters_file(const std::filesystem::path& path);

}  // namespace wpc
