#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wpc/metrics.hpp"

namespace wpc {

struct StoreKey {
    std::string workload;
    Level level = Level::IR;
    Metric metric = Metric::InstrReuseDist;
    std::string config_label;

    bool operator==(const StoreKey&) const = default;
};

// File-backed observation store. One JSON file per (workload, level, metric,
// config) key under <root>/obs/, plus an index file enumerating exactly the
// observation files present. Writes go to a temp file and are renamed into
// place; the index is rebuilt from the directory, never patched.
class ProfileStore {
public:
    explicit ProfileStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    // Insert or overwrite, then rebuild the index.
    void put(const MetricObservation& obs);

    std::optional<MetricObservation> get(const StoreKey& key) const;

    // Keys listed in the index, sorted.
    std::vector<StoreKey> list() const;

    // Rescans obs/ and atomically rewrites index.json.
    void rebuild_index();

    static StoreKey key_of(const MetricObservation& obs);
    static std::string filename_for(const StoreKey& key);

private:
    std::filesystem::path root_;
};

}  // namespace wpc
