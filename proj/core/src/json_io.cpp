#include "wpc/json_io.hpp"

#include <json.hpp>

#include "wpc/error.hpp"

namespace wpc {

namespace {

nlohmann::json parse(std::string_view text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad ") + what + " JSON: " + e.what(), 0);
    }
}

nlohmann::json observation_json(const MetricObservation& obs) {
    nlohmann::json j{
        {"workload", obs.workload_name},
        {"level", to_string(obs.level)},
        {"metric", to_string(obs.metric)},
        {"defined", obs.defined},
        {"samples", obs.sample_count},
        {"config", obs.config_label},
    };
    if (obs.defined)
        j["value"] = obs.value;
    else
        j["value"] = nullptr;
    return j;
}

MetricObservation observation_from(const nlohmann::json& j) {
    MetricObservation obs;
    obs.workload_name = j.at("workload").get<std::string>();
    obs.level = level_from_string(j.at("level").get<std::string>());
    obs.metric = metric_from_string(j.at("metric").get<std::string>());
    obs.defined = j.at("defined").get<bool>();
    obs.sample_count = j.at("samples").get<std::uint64_t>();
    obs.config_label = j.at("config").get<std::string>();
    obs.value = (obs.defined && !j.at("value").is_null()) ? j.at("value").get<double>() : 0.0;
    return obs;
}

nlohmann::json breakdown_json(const BreakdownNode& node) {
    nlohmann::json j{{"name", node.name}, {"impact", node.impact}};
    if (node.method)
        j["method"] = to_string(*node.method);
    else
        j["method"] = nullptr;
    j["children"] = nlohmann::json::array();
    for (const BreakdownNode& child : node.children) j["children"].push_back(breakdown_json(child));
    return j;
}

BreakdownNode breakdown_from(const nlohmann::json& j) {
    BreakdownNode node;
    node.name = j.at("name").get<std::string>();
    node.impact = j.at("impact").get<double>();
    if (!j.at("method").is_null())
        node.method = breakdown_method_from_string(j.at("method").get<std::string>());
    for (const auto& child : j.at("children")) node.children.push_back(breakdown_from(child));
    return node;
}

}  // namespace

std::string to_json(const MetricObservation& obs) { return observation_json(obs).dump(); }

MetricObservation observation_from_json(std::string_view text) {
    try {
        return observation_from(parse(text, "observation"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad observation JSON: ") + e.what(), 0);
    }
}

std::string to_json(const ImpactVector& impacts) {
    nlohmann::json levels = nlohmann::json::array();
    for (const ImpactLevel& l : impacts.levels) {
        levels.push_back({{"level", to_string(l.level)},
                          {"relative", l.relative},
                          {"impact", l.impact}});
    }
    return nlohmann::json{{"levels", levels}}.dump();
}

ImpactVector impact_vector_from_json(std::string_view text) {
    const nlohmann::json j = parse(text, "impact vector");
    ImpactVector v;
    try {
        for (const auto& l : j.at("levels")) {
            v.levels.push_back({level_from_string(l.at("level").get<std::string>()),
                                l.at("relative").get<double>(), l.at("impact").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad impact vector JSON: ") + e.what(), 0);
    }
    return v;
}

std::string to_json(const BreakdownNode& node) { return breakdown_json(node).dump(); }

BreakdownNode breakdown_from_json(std::string_view text) {
    try {
        return breakdown_from(parse(text, "breakdown"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad breakdown JSON: ") + e.what(), 0);
    }
}

std::string to_json(const SimResult& result) {
    return nlohmann::json{
        {"config", result.config_label},
        {"instructions", result.instructions},
        {"l1i_accesses", result.l1i_accesses},
        {"l1i_misses", result.l1i_misses},
        {"l1d_accesses", result.l1d_accesses},
        {"l1d_misses", result.l1d_misses},
        {"branches", result.branches},
        {"branch_mispredictions", result.branch_mispredictions},
        {"l1i_mpki", result.l1i_mpki()},
        {"l1d_mpki", result.l1d_mpki()},
        {"branch_mpki", result.branch_mpki()},
    }
        .dump();
}

SimResult sim_result_from_json(std::string_view text) {
    const nlohmann::json j = parse(text, "sim result");
    SimResult r;
    try {
        r.config_label = j.at("config").get<std::string>();
        r.instructions = j.at("instructions").get<std::uint64_t>();
        r.l1i_accesses = j.at("l1i_accesses").get<std::uint64_t>();
        r.l1i_misses = j.at("l1i_misses").get<std::uint64_t>();
        r.l1d_accesses = j.at("l1d_accesses").get<std::uint64_t>();
        r.l1d_misses = j.at("l1d_misses").get<std::uint64_t>();
        r.branches = j.at("branches").get<std::uint64_t>();
        r.branch_mispredictions = j.at("branch_mispredictions").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sim result JSON: ") + e.what(), 0);
    }
    return r;
}

}  // namespace wpc
