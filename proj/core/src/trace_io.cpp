#include "wpc/trace_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "wpc/error.hpp"

namespace wpc {

namespace {

class ByteWriter {
public:
    explicit ByteWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), std::streamsize(n));
        if (!out_) throw IoError("trace sink failed", written_);
        written_ += n;
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) {
        const std::uint8_t b[2] = {std::uint8_t(v), std::uint8_t(v >> 8)};
        bytes(b, 2);
    }
    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = std::uint8_t(v >> (8 * i));
        bytes(b, 8);
    }
    void str16(const std::string& s) {
        u16(std::uint16_t(s.size()));
        if (!s.empty()) bytes(s.data(), s.size());
    }

    std::uint64_t written() const { return written_; }

private:
    std::ostream& out_;
    std::uint64_t written_ = 0;
};

class ByteReader {
public:
    explicit ByteReader(std::istream& in) : in_(in) {}

    // Returns bytes actually read (short on EOF).
    std::size_t read_some(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), std::streamsize(n));
        const auto got = std::size_t(in_.gcount());
        position_ += got;
        return got;
    }
    void read_exact(void* data, std::size_t n, const char* what) {
        if (read_some(data, n) != n)
            throw FormatError(std::string("truncated trace ") + what);
    }
    std::uint8_t u8(const char* what) {
        std::uint8_t v;
        read_exact(&v, 1, what);
        return v;
    }
    std::uint16_t u16(const char* what) {
        std::uint8_t b[2];
        read_exact(b, 2, what);
        return std::uint16_t(b[0] | (std::uint16_t(b[1]) << 8));
    }
    std::uint64_t u64(const char* what) {
        std::uint8_t b[8];
        read_exact(b, 8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        return v;
    }
    std::string str16(const char* what) {
        const std::uint16_t len = u16(what);
        std::string s(len, '\0');
        if (len) read_exact(s.data(), len, what);
        return s;
    }

    std::uint64_t position() const { return position_; }

private:
    std::istream& in_;
    std::uint64_t position_ = 0;
};

std::uint8_t event_flags(const TraceEvent& e) {
    return std::uint8_t((e.taken ? 1 : 0) | (e.kernel_mode ? 2 : 0));
}

}  // namespace

std::uint64_t write_trace(const Trace& trace, std::ostream& out) {
    trace.validate();
    ByteWriter w(out);
    w.bytes(kTraceMagic.data(), kTraceMagic.size());
    w.u16(kTraceVersion);
    w.u8(std::uint8_t(trace.level));
    w.u8(0);  // reserved
    w.str16(trace.workload_name);
    w.u16(std::uint16_t(trace.tag_table.size()));
    for (const auto& tag : trace.tag_table) w.str16(tag);
    w.u8(trace.seed.has_value() ? 1 : 0);
    if (trace.seed) w.u64(*trace.seed);
    w.u64(trace.events.size());
    for (const TraceEvent& e : trace.events) {
        w.u8(std::uint8_t(e.kind));
        w.u8(event_flags(e));
        w.u16(e.tag_id);
        w.u64(e.instr_addr);
        w.u64(e.data_or_target_addr);
    }
    out.flush();
    if (!out) throw IoError("trace sink failed on flush", w.written());
    return w.written();
}

void write_trace_file(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing", 0);
    write_trace(trace, out);
}

TraceReader::TraceReader(std::istream& in) : in_(in) {
    ByteReader r(in_);
    char magic[4];
    r.read_exact(magic, 4, "magic");
    if (std::memcmp(magic, kTraceMagic.data(), 4) != 0)
        throw FormatError("bad trace magic (expected \"WPC1\")");
    const std::uint16_t version = r.u16("version");
    if (version != kTraceVersion)
        throw FormatError("unsupported trace version " + std::to_string(version));
    const std::uint8_t level = r.u8("level");
    if (level > 2) throw FormatError("unknown level byte " + std::to_string(level));
    header_.level = Level(level);
    r.u8("reserved byte");
    header_.workload_name = r.str16("workload name");
    const std::uint16_t tag_count = r.u16("tag count");
    header_.tag_table.reserve(tag_count);
    for (std::uint16_t i = 0; i < tag_count; ++i)
        header_.tag_table.push_back(r.str16("tag name"));
    const std::uint8_t seed_present = r.u8("seed flag");
    if (seed_present > 1)
        throw FormatError("bad seed-present byte " + std::to_string(seed_present));
    if (seed_present) header_.seed = r.u64("seed");
    header_.event_count = r.u64("event count");
}

bool TraceReader::next(TraceEvent& event) {
    if (read_ >= header_.event_count) return false;
    std::uint8_t rec[kEventRecordSize];
    in_.read(reinterpret_cast<char*>(rec), kEventRecordSize);
    if (std::size_t(in_.gcount()) != kEventRecordSize)
        throw CorruptionError("truncated event record at index " + std::to_string(read_), read_);
    if (rec[0] > std::uint8_t(EventKind::Branch))
        throw FormatError("unknown event kind byte " + std::to_string(rec[0]) + " at index " +
                          std::to_string(read_));
    event.kind = EventKind(rec[0]);
    event.taken = (rec[1] & 1) != 0;
    event.kernel_mode = (rec[1] & 2) != 0;
    event.tag_id = std::uint16_t(rec[2] | (std::uint16_t(rec[3]) << 8));
    std::uint64_t instr = 0, data = 0;
    for (int i = 0; i < 8; ++i) instr |= std::uint64_t(rec[4 + i]) << (8 * i);
    for (int i = 0; i < 8; ++i) data |= std::uint64_t(rec[12 + i]) << (8 * i);
    event.instr_addr = instr;
    event.data_or_target_addr = data;
    if (event.tag_id >= header_.tag_table.size())
        throw FormatError("event at index " + std::to_string(read_) + " references tag " +
                          std::to_string(event.tag_id) + " outside the tag table");
    ++read_;
    return true;
}

Trace read_trace(std::istream& in) {
    TraceReader reader(in);
    Trace trace;
    trace.level = reader.header().level;
    trace.workload_name = reader.header().workload_name;
    trace.tag_table = reader.header().tag_table;
    trace.seed = reader.header().seed;
    trace.events.reserve(reader.header().event_count);
    TraceEvent e;
    while (reader.next(e)) trace.events.push_back(e);
    return trace;
}

Trace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading", 0);
    return read_trace(in);
}

namespace {

nlohmann::json event_to_json(const TraceEvent& e) {
    return nlohmann::json{
        {"kind", to_string(e.kind)},
        {"instr_addr", e.instr_addr},
        {"data_or_target_addr", e.data_or_target_addr},
        {"taken", e.taken},
        {"kernel_mode", e.kernel_mode},
        {"tag_id", e.tag_id},
    };
}

TraceEvent event_from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.instr_addr = j.at("instr_addr").get<std::uint64_t>();
    e.data_or_target_addr = j.at("data_or_target_addr").get<std::uint64_t>();
    e.taken = j.at("taken").get<bool>();
    e.kernel_mode = j.at("kernel_mode").get<bool>();
    e.tag_id = j.at("tag_id").get<std::uint16_t>();
    return e;
}

}  // namespace

std::uint64_t write_trace_jsonl(const Trace& trace, std::ostream& out) {
    trace.validate();
    nlohmann::json header{
        {"format", "wpc-jsonl"},
        {"version", kTraceVersion},
        {"level", to_string(trace.level)},
        {"workload", trace.workload_name},
        {"tags", trace.tag_table},
        {"event_count", trace.events.size()},
    };
    if (trace.seed)
        header["seed"] = *trace.seed;
    else
        header["seed"] = nullptr;
    std::uint64_t written = 0;
    auto emit = [&](const nlohmann::json& j) {
        const std::string line = j.dump();
        out << line << '\n';
        if (!out) throw IoError("trace sink failed", written);
        written += line.size() + 1;
    };
    emit(header);
    for (const TraceEvent& e : trace.events) emit(event_to_json(e));
    return written;
}

Trace read_trace_jsonl(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw FormatError("empty jsonl trace");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad jsonl header: ") + e.what(), line_no);
    }
    if (header.value("format", "") != "wpc-jsonl")
        throw FormatError("not a wpc-jsonl trace");
    Trace trace;
    try {
        trace.level = level_from_string(header.at("level").get<std::string>());
        trace.workload_name = header.at("workload").get<std::string>();
        trace.tag_table = header.at("tags").get<std::vector<std::string>>();
        if (!header.at("seed").is_null()) trace.seed = header.at("seed").get<std::uint64_t>();
        const auto count = header.at("event_count").get<std::uint64_t>();
        trace.events.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            if (!next_line())
                throw CorruptionError("jsonl trace truncated at event index " + std::to_string(i), i);
            trace.events.push_back(event_from_json(nlohmann::json::parse(line)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad jsonl record: ") + e.what(), line_no);
    }
    trace.validate();
    return trace;
}

void write_trace_jsonl_file(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing", 0);
    write_trace_jsonl(trace, out);
}

Trace read_trace_jsonl_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading", 0);
    return read_trace_jsonl(in);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t start = field.find_first_not_of(' ');
        fields.push_back(start == std::string::npos ? "" : field.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::uint64_t parse_count(const std::string& field, const char* column, std::size_t line_no) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line_no) + ": column '" + column +
                             "' is not a count: '" + field + "'",
                         line_no);
    return value;
}

}  // namespace

std::vector<CounterRecord> read_counters(std::istream& in) {
    static const char* kColumns[6] = {"workload",   "instructions",
                                      "l1i_misses", "l1d_misses",
                                      "branch_mispredictions", "config"};
    std::string line;
    std::size_t line_no = 0;
    // Header.
    do {
        if (!std::getline(in, line)) throw SchemaError("counter CSV has no header line");
        ++line_no;
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    const auto header = split_csv_line(line);
    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t i = 0; i < header.size(); ++i) column_of.emplace(header[i], i);
    std::size_t index[6];
    for (int c = 0; c < 6; ++c) {
        const auto it = column_of.find(kColumns[c]);
        if (it == column_of.end())
            throw SchemaError(std::string("counter CSV is missing column '") + kColumns[c] + "'");
        index[c] = it->second;
    }

    std::vector<CounterRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank
        const auto fields = split_csv_line(line);
        for (int c = 0; c < 6; ++c) {
            if (index[c] >= fields.size())
                throw ParseError("line " + std::to_string(line_no) + ": missing value for column '" +
                                     kColumns[c] + "'",
                                 line_no);
        }
        CounterRecord rec;
        rec.workload_name = fields[index[0]];
        rec.instructions = parse_count(fields[index[1]], kColumns[1], line_no);
        rec.l1i_misses = parse_count(fields[index[2]], kColumns[2], line_no);
        rec.l1d_misses = parse_count(fields[index[3]], kColumns[3], line_no);
        rec.branch_mispredictions = parse_count(fields[index[4]], kColumns[4], line_no);
        rec.config_label = fields[index[5]];
        if (rec.instructions == 0)
            throw ParseError("line " + std::to_string(line_no) + ": instructions must be positive",
                             line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<CounterRecord> read_counters_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading", 0);
    return read_counters(in);
}

}  // namespace wpc
