#include "wpc/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wpc/error.hpp"
#include "wpc/json_io.hpp"

namespace wpc {

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '-';
        out.push_back(ok ? c : '_');
    }
    if (out.size() > 48) out.resize(48);
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing", 0);
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string(), 0);
    }
    std::filesystem::rename(tmp, path);
}

bool key_less(const StoreKey& a, const StoreKey& b) {
    return std::tie(a.workload, a.level, a.metric, a.config_label) <
           std::tie(b.workload, b.level, b.metric, b.config_label);
}

}  // namespace

ProfileStore::ProfileStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "obs");
}

StoreKey ProfileStore::key_of(const MetricObservation& obs) {
    return {obs.workload_name, obs.level, obs.metric, obs.config_label};
}

std::string ProfileStore::filename_for(const StoreKey& key) {
    // Readable prefix plus a hash of the raw key, so sanitized collisions
    // cannot alias two keys.
    const std::string raw = key.workload + "\x1f" + to_string(key.level) + "\x1f" +
                            to_string(key.metric) + "\x1f" + key.config_label;
    std::ostringstream name;
    name << sanitize(key.workload) << "__" << to_string(key.level) << "__" << to_string(key.metric)
         << "__" << sanitize(key.config_label) << "__" << std::hex << fnv1a(raw) << ".json";
    return name.str();
}

void ProfileStore::put(const MetricObservation& obs) {
    const auto path = root_ / "obs" / filename_for(key_of(obs));
    write_file_atomic(path, to_json(obs) + "\n");
    rebuild_index();
}

std::optional<MetricObservation> ProfileStore::get(const StoreKey& key) const {
    const auto path = root_ / "obs" / filename_for(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return observation_from_json(read_file(path));
}

std::vector<StoreKey> ProfileStore::list() const {
    const auto index_path = root_ / "index.json";
    std::vector<StoreKey> keys;
    if (!std::filesystem::exists(index_path)) return keys;
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(read_file(index_path));
        for (const auto& entry : index.at("entries")) {
            keys.push_back({entry.at("workload").get<std::string>(),
                            level_from_string(entry.at("level").get<std::string>()),
                            metric_from_string(entry.at("metric").get<std::string>()),
                            entry.at("config").get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad store index: ") + e.what(), 0);
    }
    return keys;
}

void ProfileStore::rebuild_index() {
    std::vector<std::pair<StoreKey, std::string>> entries;
    for (const auto& dirent : std::filesystem::directory_iterator(root_ / "obs")) {
        if (!dirent.is_regular_file()) continue;
        const auto& path = dirent.path();
        if (path.extension() != ".json") continue;
        const MetricObservation obs = observation_from_json(read_file(path));
        entries.emplace_back(key_of(obs), path.filename().string());
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return key_less(a.first, b.first); });
    nlohmann::json index;
    index["entries"] = nlohmann::json::array();
    for (const auto& [key, file] : entries) {
        index["entries"].push_back({{"workload", key.workload},
                                    {"level", to_string(key.level)},
                                    {"metric", to_string(key.metric)},
                                    {"config", key.config_label},
                                    {"file", file}});
    }
    write_file_atomic(root_ / "index.json", index.dump(2) + "\n");
}

}  // namespace wpc
