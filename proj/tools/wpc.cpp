// wpc: generate reference workloads, analyze traces, simulate a cache level,
// and fuse per-level observations into normalized impact factors.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wpc/error.hpp"
#include "wpc/fusion.hpp"
#include "wpc/json_io.hpp"
#include "wpc/metrics.hpp"
#include "wpc/refgen.hpp"
#include "wpc/sim.hpp"
#include "wpc/store.hpp"
#include "wpc/trace_io.hpp"
#include "wpc/version.hpp"

using nlohmann::json;

namespace {

// Exit codes: 0 ok, 2 parameter/format error, 3 missing data, 4 I/O error.
constexpr int kExitOk = 0;
constexpr int kExitParameter = 2;
constexpr int kExitMissingData = 3;
constexpr int kExitIo = 4;

struct GlobalOptions {
    std::string store_dir = "wpc-store";
    bool no_timestamp = false;
    std::string format = "json";
};

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

json provenance(const GlobalOptions& global, const std::string& command) {
    json p{{"tool", "wpc"}, {"version", wpc::kVersion}, {"command", command}};
    if (!global.no_timestamp) p["generated_at"] = iso8601_now();
    return p;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw wpc::IoError("cannot open " + path + " for writing", 0);
    out << content;
    if (!out) throw wpc::IoError("write failed for " + path, 0);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

wpc::Trace load_trace(const std::string& path) {
    return has_suffix(path, ".jsonl") ? wpc::read_trace_jsonl_file(path)
                                      : wpc::read_trace_file(path);
}

json generator_config_json(const wpc::GeneratorConfig& cfg) {
    return json{{"workload_kind", wpc::to_string(cfg.kind)},
                {"x", cfg.x},
                {"iterations", cfg.iterations},
                {"b", cfg.body_instructions},
                {"h", cfg.harness_instructions},
                {"m", cfg.branch_range},
                {"element_stride", cfg.element_stride},
                {"function_stride", cfg.function_stride},
                {"seed", cfg.seed},
                {"level", wpc::to_string(cfg.level)}};
}

void apply_config_file(wpc::GeneratorConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw wpc::IoError("cannot open " + path + " for reading", 0);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw wpc::ParseError(std::string("bad generator config: ") + e.what(), 0);
    }
    if (j.contains("workload_kind"))
        cfg.kind = wpc::workload_kind_from_string(j["workload_kind"].get<std::string>());
    if (j.contains("x")) cfg.x = j["x"].get<std::uint64_t>();
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<std::uint64_t>();
    if (j.contains("b")) cfg.body_instructions = j["b"].get<std::uint32_t>();
    if (j.contains("h")) cfg.harness_instructions = j["h"].get<std::uint32_t>();
    if (j.contains("m")) cfg.branch_range = j["m"].get<std::uint64_t>();
    if (j.contains("element_stride")) cfg.element_stride = j["element_stride"].get<std::uint64_t>();
    if (j.contains("function_stride"))
        cfg.function_stride = j["function_stride"].get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("level")) cfg.level = wpc::level_from_string(j["level"].get<std::string>());
}

// --- gen-ref -------------------------------------------------------------

struct GenRefArgs {
    wpc::GeneratorConfig cfg;
    std::string kind = "data";
    std::string level = "IR";
    std::string config_file;
    std::string out;
    bool text = false;
};

int run_gen_ref(const GlobalOptions& global, GenRefArgs& args) {
    if (!args.config_file.empty()) apply_config_file(args.cfg, args.config_file);
    args.cfg.kind = wpc::workload_kind_from_string(args.kind);
    args.cfg.level = wpc::level_from_string(args.level);
    const wpc::Trace trace = wpc::generate(args.cfg);
    if (args.text || has_suffix(args.out, ".jsonl"))
        wpc::write_trace_jsonl_file(trace, args.out);
    else
        wpc::write_trace_file(trace, args.out);

    json sidecar = provenance(global, "gen-ref");
    sidecar["config"] = generator_config_json(args.cfg);
    sidecar["theoretical_prediction"] = wpc::theoretical_prediction(args.cfg);
    sidecar["footprint_bytes"] = wpc::footprint_bytes(args.cfg);
    sidecar["events"] = trace.events.size();
    sidecar["trace"] = args.out;
    write_text_file(args.out + ".json", sidecar.dump(2) + "\n");
    std::cout << "wrote " << args.out << " (" << trace.events.size() << " events), prediction "
              << wpc::theoretical_prediction(args.cfg) << "\n";
    return kExitOk;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string trace_path;
    std::string counters_path;
    std::string workload;
    std::string config_label = "default";
    std::vector<std::string> families = {"inst", "data", "branch"};
};

int run_analyze(const GlobalOptions& global, AnalyzeArgs& args) {
    wpc::ProfileStore store(global.store_dir);
    if (!args.counters_path.empty()) {
        const auto records = wpc::read_counters_file(args.counters_path);
        for (const auto& rec : records)
            for (const auto& obs : wpc::mpki_from_counters(rec)) {
                store.put(obs);
                std::cout << wpc::to_json(obs) << "\n";
            }
        std::cout << "ingested " << records.size() << " counter records\n";
        return kExitOk;
    }

    std::ifstream in(args.trace_path, std::ios::binary);
    if (!in) throw wpc::IoError("cannot open " + args.trace_path + " for reading", 0);
    wpc::Trace trace;
    if (has_suffix(args.trace_path, ".jsonl")) {
        trace = wpc::read_trace_jsonl(in);
    } else {
        // Stream the binary format through the accumulators.
        wpc::TraceReader reader(in);
        trace.level = reader.header().level;
        trace.workload_name = reader.header().workload_name;
        wpc::InstrReuseAccumulator instr;
        wpc::DataReuseAccumulator data;
        wpc::BranchEntropyAccumulator branch;
        wpc::TraceEvent e;
        while (reader.next(e)) {
            instr.add(e);
            data.add(e);
            branch.add(e);
        }
        const std::string workload = args.workload.empty() ? trace.workload_name : args.workload;
        bool any_defined = false;
        for (const auto& family : args.families) {
            wpc::MetricObservation obs;
            switch (wpc::family_from_string(family)) {
                case wpc::LocalityFamily::Instruction:
                    obs = instr.finish(workload, trace.level, args.config_label);
                    break;
                case wpc::LocalityFamily::Data:
                    obs = data.finish(workload, trace.level, args.config_label);
                    break;
                case wpc::LocalityFamily::Branch:
                    obs = branch.finish(workload, trace.level, args.config_label);
                    break;
            }
            store.put(obs);
            std::cout << wpc::to_json(obs) << "\n";
            any_defined = any_defined || obs.defined;
        }
        // "no data" is distinct from failure: observations were stored, but
        // every one of them is undefined.
        return any_defined ? kExitOk : kExitMissingData;
    }

    // jsonl path: analyze the materialized trace.
    const std::string workload = args.workload.empty() ? trace.workload_name : args.workload;
    bool any_defined = false;
    for (const auto& family : args.families) {
        wpc::MetricObservation obs;
        switch (wpc::family_from_string(family)) {
            case wpc::LocalityFamily::Instruction:
                obs = wpc::instruction_reuse_distance(trace, args.config_label);
                break;
            case wpc::LocalityFamily::Data:
                obs = wpc::data_reuse_distance(trace, args.config_label);
                break;
            case wpc::LocalityFamily::Branch:
                obs = wpc::branch_entropy(trace, args.config_label).first;
                break;
        }
        obs.workload_name = workload;
        store.put(obs);
        std::cout << wpc::to_json(obs) << "\n";
        any_defined = any_defined || obs.defined;
    }
    return any_defined ? kExitOk : kExitMissingData;
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string trace_path;
    std::string platform = "gold5120t-like";
    std::string prefetch = "off";
    std::uint64_t l1i_kb = 0;  // 0: use platform preset
    std::uint64_t l1d_kb = 0;
    std::uint32_t line_bytes = 64;
    std::uint32_t assoc = 8;
    std::uint32_t predictor_entries = 4096;
    std::string config_label;
    std::string workload;
    std::string out;
};

int run_simulate(const GlobalOptions& global, SimulateArgs& args) {
    wpc::PlatformPreset preset = wpc::platform_preset(args.platform);
    if (args.l1i_kb) preset.l1i = wpc::CacheConfig{args.l1i_kb * 1024, args.line_bytes, args.assoc};
    if (args.l1d_kb) preset.l1d = wpc::CacheConfig{args.l1d_kb * 1024, args.line_bytes, args.assoc};
    preset.predictor.table_entries = args.predictor_entries;
    if (args.prefetch != "on" && args.prefetch != "off")
        throw wpc::ParameterError("--prefetch must be 'on' or 'off'");
    const bool prefetch = args.prefetch == "on";
    preset.l1i.prefetch_next_line = prefetch;
    preset.l1d.prefetch_next_line = prefetch;
    const std::string label = args.config_label.empty()
                                  ? preset.name + (prefetch ? "+prefetch" : "")
                                  : args.config_label;

    std::ifstream in(args.trace_path, std::ios::binary);
    if (!in) throw wpc::IoError("cannot open " + args.trace_path + " for reading", 0);
    wpc::Simulation sim(preset.l1i, preset.l1d, preset.predictor, label);
    std::string workload = args.workload;
    if (has_suffix(args.trace_path, ".jsonl")) {
        const wpc::Trace trace = wpc::read_trace_jsonl(in);
        if (workload.empty()) workload = trace.workload_name;
        for (const auto& e : trace.events) sim.step(e);
    } else {
        wpc::TraceReader reader(in);
        if (workload.empty()) workload = reader.header().workload_name;
        wpc::TraceEvent e;
        while (reader.next(e)) sim.step(e);
    }
    const wpc::SimResult result = sim.result();

    wpc::ProfileStore store(global.store_dir);
    wpc::CounterRecord rec{workload, result.instructions, result.l1i_misses, result.l1d_misses,
                           result.branch_mispredictions, label};
    for (const auto& obs : wpc::mpki_from_counters(rec)) store.put(obs);

    json report = provenance(global, "simulate");
    report["workload"] = workload;
    report["platform"] = preset.name;
    report["prefetch"] = prefetch;
    report["result"] = json::parse(wpc::to_json(result));
    const std::string text = report.dump(2) + "\n";
    if (!args.out.empty()) write_text_file(args.out, text);
    std::cout << text;
    return kExitOk;
}

// --- sweep -------------------------------------------------------------------

struct SweepArgs {
    std::string kind = "inst";
    std::vector<std::uint64_t> xs;
    std::uint64_t iterations = 200000;
    std::uint64_t seed = 42;
    std::string platform = "gold5120t-like";
    std::string prefetch = "off";
    double theta = 5.0;
    std::string out_csv;
    std::string knee_out;
    bool store_observations = true;
};

int run_sweep(const GlobalOptions& global, SweepArgs& args) {
    if (args.xs.size() < 4)
        throw wpc::ParameterError("sweep needs at least 4 x values for knee detection");
    const wpc::WorkloadKind kind = wpc::workload_kind_from_string(args.kind);
    wpc::PlatformPreset preset = wpc::platform_preset(args.platform);
    const bool prefetch = args.prefetch == "on";
    preset.l1i.prefetch_next_line = prefetch;
    preset.l1d.prefetch_next_line = prefetch;
    const std::string label = preset.name + (prefetch ? "+prefetch" : "");

    wpc::ProfileStore store(global.store_dir);
    std::ostringstream csv;
    csv << "x,config,l1i_mpki,l1d_mpki,branch_mpki\n";
    std::vector<wpc::SweepPoint> sweep;
    for (const std::uint64_t x : args.xs) {
        wpc::GeneratorConfig cfg;
        cfg.kind = kind;
        cfg.x = x;
        cfg.iterations = args.iterations;
        cfg.seed = args.seed;
        wpc::Trace trace = wpc::generate(cfg);
        const std::string workload = trace.workload_name + "-x" + std::to_string(x);
        const auto result =
            wpc::simulate(trace, preset.l1i, preset.l1d, preset.predictor, label);
        csv << x << ',' << label << ',' << result.l1i_mpki() << ',' << result.l1d_mpki() << ','
            << result.branch_mpki() << "\n";

        double mpki = 0;
        switch (kind) {
            case wpc::WorkloadKind::InstructionLocality: mpki = result.l1i_mpki(); break;
            case wpc::WorkloadKind::DataLocality: mpki = result.l1d_mpki(); break;
            case wpc::WorkloadKind::BranchLocality: mpki = result.branch_mpki(); break;
        }
        sweep.push_back({x, mpki});

        if (args.store_observations) {
            wpc::MetricObservation trace_obs;
            switch (kind) {
                case wpc::WorkloadKind::InstructionLocality:
                    trace_obs = wpc::instruction_reuse_distance(trace, label);
                    break;
                case wpc::WorkloadKind::DataLocality:
                    trace_obs = wpc::data_reuse_distance(trace, label);
                    break;
                case wpc::WorkloadKind::BranchLocality:
                    trace_obs = wpc::branch_entropy(trace, label).first;
                    break;
            }
            trace_obs.workload_name = workload;
            store.put(trace_obs);
            wpc::CounterRecord rec{workload, result.instructions, result.l1i_misses,
                                   result.l1d_misses, result.branch_mispredictions, label};
            for (const auto& obs : wpc::mpki_from_counters(rec)) store.put(obs);
        }
    }

    const auto knee = wpc::detect_knee(sweep, args.theta);
    json report = provenance(global, "sweep");
    report["kind"] = args.kind;
    report["platform"] = preset.name;
    report["prefetch"] = prefetch;
    report["iterations"] = args.iterations;
    report["seed"] = args.seed;
    report["theta"] = knee.theta;
    report["floor_mpki"] = knee.floor_mpki;
    if (knee.knee_x)
        report["knee_x"] = *knee.knee_x;
    else
        report["knee_x"] = nullptr;
    report["points"] = json::array();
    for (const auto& p : sweep) report["points"].push_back({{"x", p.x}, {"mpki", p.mpki}});

    if (!args.out_csv.empty()) write_text_file(args.out_csv, csv.str());
    if (!args.knee_out.empty()) write_text_file(args.knee_out, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

// --- fuse ---------------------------------------------------------------------

struct FuseArgs {
    std::string workload;
    std::string reference;
    std::string family = "inst";
    std::string config_label = "default";
    std::string reference_config = "default";
    std::string out;
};

int run_fuse(const GlobalOptions& global, FuseArgs& args) {
    wpc::ProfileStore store(global.store_dir);
    const wpc::LocalityFamily family = wpc::family_from_string(args.family);
    std::vector<wpc::MetricObservation> observed, reference;
    for (const wpc::Level level : {wpc::Level::IR, wpc::Level::ISA, wpc::Level::UARCH}) {
        const wpc::Metric metric = wpc::metric_for(family, level);
        const auto obs = store.get({args.workload, level, metric, args.config_label});
        const auto ref = store.get({args.reference, level, metric, args.reference_config});
        if (obs && ref) {
            observed.push_back(*obs);
            reference.push_back(*ref);
        } else if (obs || ref) {
            const bool missing_ref = obs.has_value();
            throw wpc::MissingDataError(
                std::string("store lacks (") + (missing_ref ? args.reference : args.workload) +
                ", " + wpc::to_string(level) + ", " + wpc::to_string(metric) + ", " +
                (missing_ref ? args.reference_config : args.config_label) + ")");
        }
    }
    if (observed.size() < 2)
        throw wpc::MissingDataError("store holds fewer than 2 shared levels for workload '" +
                                    args.workload + "' and reference '" + args.reference + "'");
    const wpc::MetricVector vector = wpc::make_metric_vector(observed, reference);
    const wpc::ImpactVector impacts = wpc::impact_factors(vector);

    json report = provenance(global, "fuse");
    report["workload"] = args.workload;
    report["reference"] = args.reference;
    report["family"] = args.family;
    report["impacts"] = json::parse(wpc::to_json(impacts));
    if (!args.out.empty()) write_text_file(args.out, report.dump(2) + "\n");

    if (global.format == "csv") {
        std::printf("level,observed,reference,relative,impact\n");
        for (std::size_t i = 0; i < impacts.levels.size(); ++i) {
            std::printf("%s,%g,%g,%g,%g\n", wpc::to_string(impacts.levels[i].level),
                        vector.levels[i].observed, vector.levels[i].reference,
                        impacts.levels[i].relative, impacts.levels[i].impact);
        }
        return kExitOk;
    }
    std::printf("%-7s %14s %14s %10s %8s\n", "level", "observed", "reference", "relative",
                "impact");
    for (std::size_t i = 0; i < impacts.levels.size(); ++i) {
        std::printf("%-7s %14.4f %14.4f %10.3f %8.3f\n",
                    wpc::to_string(impacts.levels[i].level), vector.levels[i].observed,
                    vector.levels[i].reference, impacts.levels[i].relative,
                    impacts.levels[i].impact);
    }
    return kExitOk;
}

// --- breakdown ------------------------------------------------------------------

struct BreakdownArgs {
    std::string impacts_file;
    std::string workload = "workload";
    std::string family = "inst";
    std::string ir_trace;
    std::string uarch_trace;
    double isa_full = 0;
    double isa_ablated = 0;
    bool has_differential = false;
    std::string isa_component = "runtime-daemons";
    std::string isa_residual = "runtime";
    double mpki = -1;
    std::string out;
    std::string csv_out;
};

int run_breakdown(const GlobalOptions& global, BreakdownArgs& args) {
    std::ifstream in(args.impacts_file);
    if (!in) throw wpc::IoError("cannot open " + args.impacts_file + " for reading", 0);
    std::stringstream buffer;
    buffer << in.rdbuf();
    json impacts_doc;
    try {
        impacts_doc = json::parse(buffer.str());
    } catch (const json::exception& e) {
        throw wpc::ParseError(std::string("bad impacts file: ") + e.what(), 0);
    }
    const json impacts_json =
        impacts_doc.contains("impacts") ? impacts_doc["impacts"] : impacts_doc;
    const wpc::ImpactVector impacts = wpc::impact_vector_from_json(impacts_json.dump());
    const wpc::LocalityFamily family = wpc::family_from_string(args.family);

    wpc::BreakdownNode root{args.workload, 0.0, std::nullopt, {}};
    for (const auto& level : impacts.levels) {
        root.impact += level.impact;
        wpc::BreakdownNode node{std::string(wpc::to_string(level.level)) + "-dependent",
                                level.impact, std::nullopt, {}};
        if (level.level == wpc::Level::IR && !args.ir_trace.empty()) {
            const wpc::Trace trace = load_trace(args.ir_trace);
            node.children = wpc::breakdown_by_tags(
                trace, wpc::metric_for(family, wpc::Level::IR), level.impact);
        } else if (level.level == wpc::Level::ISA && args.has_differential) {
            wpc::MetricObservation full, ablated;
            full.metric = ablated.metric = wpc::metric_for(family, wpc::Level::ISA);
            full.level = ablated.level = wpc::Level::ISA;
            full.defined = ablated.defined = true;
            full.sample_count = ablated.sample_count = 1;
            full.value = args.isa_full;
            ablated.value = args.isa_ablated;
            const auto split = wpc::breakdown_differential(full, ablated, level.impact,
                                                           args.isa_component, args.isa_residual);
            node.children = {split.component, split.residual};
            if (split.ablation_worsened)
                std::cerr << "warning: ablated value exceeds full value; component share clamped "
                             "to 0\n";
        } else if (level.level == wpc::Level::UARCH && !args.uarch_trace.empty()) {
            const wpc::Trace trace = load_trace(args.uarch_trace);
            const auto share =
                wpc::kernel_noise_share(trace, wpc::metric_for(family, wpc::Level::IR));
            wpc::BreakdownNode os{"os-noise", level.impact * share.reported,
                                  wpc::BreakdownMethod::TagShare, {}};
            wpc::BreakdownNode rest{"microarchitecture", level.impact * (1.0 - share.reported),
                                    wpc::BreakdownMethod::Residual, {}};
            node.children = {os, rest};
        }
        root.children.push_back(std::move(node));
    }

    json report = provenance(global, "breakdown");
    report["workload"] = args.workload;
    report["family"] = args.family;
    report["tree"] = json::parse(wpc::to_json(root));
    if (args.mpki >= 0) {
        const auto rows = wpc::normalized_mpki_breakdown(root, args.mpki);
        report["normalized_mpki"] = json::array();
        for (const auto& row : rows)
            report["normalized_mpki"].push_back({{"component", row.name},
                                                 {"impact", row.impact},
                                                 {"mpki", row.normalized_mpki},
                                                 {"mpki_rounded", wpc::present_round(row.normalized_mpki)}});
    }
    if (!args.out.empty()) write_text_file(args.out, report.dump(2) + "\n");
    if (!args.csv_out.empty()) {
        std::ostringstream csv;
        csv << "path,impact,method\n";
        const auto walk = [&](const wpc::BreakdownNode& node, const std::string& prefix,
                              const auto& recurse) -> void {
            const std::string path = prefix.empty() ? node.name : prefix + "/" + node.name;
            csv << path << ',' << node.impact << ','
                << (node.method ? wpc::to_string(*node.method) : "") << "\n";
            for (const auto& child : node.children) recurse(child, path, recurse);
        };
        walk(root, "", walk);
        write_text_file(args.csv_out, csv.str());
    }
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

// --- correlate ----------------------------------------------------------------

struct CorrelateArgs {
    std::string family = "inst";
    std::vector<std::string> levels = {"IR", "UARCH"};
    std::vector<std::string> workloads;
    std::string config_label;
    std::string out;
};

int run_correlate(const GlobalOptions& global, CorrelateArgs& args) {
    if (args.levels.size() != 2) throw wpc::ParameterError("--levels needs exactly two levels");
    const wpc::LocalityFamily family = wpc::family_from_string(args.family);
    const wpc::Level level_a = wpc::level_from_string(args.levels[0]);
    const wpc::Level level_b = wpc::level_from_string(args.levels[1]);
    wpc::ProfileStore store(global.store_dir);

    // With no explicit config label, accept any config present for the key.
    std::vector<wpc::StoreKey> keys = store.list();
    auto find_value = [&](const std::string& workload, wpc::Level level) -> std::optional<double> {
        const wpc::Metric metric = wpc::metric_for(family, level);
        for (const auto& key : keys) {
            if (key.workload != workload || key.level != level || key.metric != metric) continue;
            if (!args.config_label.empty() && key.config_label != args.config_label) continue;
            const auto obs = store.get(key);
            if (obs && obs->defined) return obs->value;
        }
        return std::nullopt;
    };

    std::vector<double> xs, ys;
    std::vector<std::string> used;
    for (const auto& workload : args.workloads) {
        const auto a = find_value(workload, level_a);
        const auto b = find_value(workload, level_b);
        if (!a || !b)
            throw wpc::MissingDataError("store lacks (" + workload + ", " +
                                        (a ? args.levels[1] : args.levels[0]) + ", " +
                                        wpc::to_string(wpc::metric_for(family, a ? level_b : level_a)) +
                                        ")");
        xs.push_back(*a);
        ys.push_back(*b);
        used.push_back(workload);
    }

    json report = provenance(global, "correlate");
    report["family"] = args.family;
    report["levels"] = args.levels;
    report["workloads"] = used;
    try {
        const double r = wpc::pearson(xs, ys);
        report["pearson"] = r;
        report["defined"] = true;
    } catch (const wpc::UndefinedCorrelationError& e) {
        report["pearson"] = nullptr;
        report["defined"] = false;
        report["note"] = e.what();
    }
    if (!args.out.empty()) write_text_file(args.out, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

// --- calibrate -----------------------------------------------------------------

struct CalibrateArgs {
    std::string kind = "inst";
    std::vector<std::uint64_t> candidates;
    std::uint64_t iterations = 1000000;
    std::uint64_t seed = 42;
    double threshold = 0.02;
    std::uint32_t b = 5;
    std::uint32_t h = 2;
    std::uint64_t m = 1000;
    std::string out;
};

int run_calibrate(const GlobalOptions& global, CalibrateArgs& args) {
    wpc::CalibrationOptions opts;
    opts.iterations = args.iterations;
    opts.threshold = args.threshold;
    opts.body_instructions = args.b;
    opts.harness_instructions = args.h;
    opts.branch_range = args.m;
    const auto result = wpc::calibrate_x(wpc::workload_kind_from_string(args.kind),
                                         args.candidates, args.seed, opts);

    json report = provenance(global, "calibrate");
    report["kind"] = args.kind;
    report["threshold"] = result.threshold;
    report["iterations"] = args.iterations;
    report["seed"] = args.seed;
    report["table"] = json::array();
    for (const auto& row : result.table)
        report["table"].push_back({{"x", row.x},
                                   {"predicted", row.predicted},
                                   {"measured", row.measured},
                                   {"rel_error", row.rel_error},
                                   {"qualifies", row.qualifies}});
    if (result.chosen_x)
        report["chosen_x"] = *result.chosen_x;
    else
        report["chosen_x"] = nullptr;
    if (!args.out.empty()) write_text_file(args.out, report.dump(2) + "\n");
    std::cout << report.dump(2) << "\n";
    return result.chosen_x ? kExitOk : kExitMissingData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-driven workload characterization across IR, ISA, and cache levels"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--store", global.store_dir, "observation store directory")
        ->capture_default_str();
    app.add_flag("--no-timestamp", global.no_timestamp, "omit timestamps from reports");
    app.add_option("--format", global.format, "report format hint (json|csv)")
        ->check(CLI::IsMember({"json", "csv"}));
    std::uint64_t global_seed = 0;
    auto* global_seed_opt =
        app.add_option("--seed", global_seed, "default PRNG seed for subcommands");

    GenRefArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-ref", "generate a reference workload trace");
    cmd_gen->add_option("--kind", gen.kind, "data|inst|branch")->capture_default_str();
    cmd_gen->add_option("--x", gen.cfg.x, "controlled parameter");
    cmd_gen->add_option("--iters", gen.cfg.iterations, "loop iterations");
    auto* gen_seed = cmd_gen->add_option("--seed", gen.cfg.seed, "PRNG seed")->capture_default_str();
    cmd_gen->add_option("--b", gen.cfg.body_instructions, "instructions per function body");
    cmd_gen->add_option("--harness", gen.cfg.harness_instructions, "harness instructions per iteration");
    cmd_gen->add_option("--m", gen.cfg.branch_range, "branch threshold range bound");
    cmd_gen->add_option("--element-stride", gen.cfg.element_stride, "bytes between data elements");
    cmd_gen->add_option("--function-stride", gen.cfg.function_stride,
                        "bytes between function entries");
    cmd_gen->add_option("--level", gen.level, "IR|ISA level stamp")->capture_default_str();
    cmd_gen->add_option("--config", gen.config_file, "generator config JSON file");
    cmd_gen->add_flag("--text", gen.text, "write the JSON-lines text format");
    cmd_gen->add_option("-o,--out", gen.out, "output trace path")->required();

    AnalyzeArgs analyze;
    auto* cmd_analyze = app.add_subcommand("analyze", "measure locality metrics on a trace");
    cmd_analyze->add_option("--trace", analyze.trace_path, "trace file (.wpc or .jsonl)");
    cmd_analyze->add_option("--counters", analyze.counters_path,
                            "counter CSV to ingest instead of a trace");
    cmd_analyze->add_option("--workload", analyze.workload, "override workload name");
    cmd_analyze->add_option("--config-label", analyze.config_label, "config label for the store")
        ->capture_default_str();
    cmd_analyze->add_option("--metrics", analyze.families, "families to measure (inst,data,branch)")
        ->delimiter(',');

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "run the cache/predictor level on a trace");
    cmd_sim->add_option("--trace", sim.trace_path, "trace file")->required();
    cmd_sim->add_option("--platform", sim.platform, "platform preset")->capture_default_str();
    cmd_sim->add_option("--prefetch", sim.prefetch, "next-line prefetch on|off")
        ->capture_default_str();
    cmd_sim->add_option("--l1i-kb", sim.l1i_kb, "override L1I capacity in KB");
    cmd_sim->add_option("--l1d-kb", sim.l1d_kb, "override L1D capacity in KB");
    cmd_sim->add_option("--line", sim.line_bytes, "line size in bytes")->capture_default_str();
    cmd_sim->add_option("--assoc", sim.assoc, "associativity")->capture_default_str();
    cmd_sim->add_option("--predictor-entries", sim.predictor_entries, "bimodal table entries")
        ->capture_default_str();
    cmd_sim->add_option("--config-label", sim.config_label, "config label for the store");
    cmd_sim->add_option("--workload", sim.workload, "override workload name");
    cmd_sim->add_option("-o,--out", sim.out, "write the simulation report JSON here");

    SweepArgs sweep;
    auto* cmd_sweep = app.add_subcommand("sweep", "generate, simulate, and knee-detect over x");
    cmd_sweep->add_option("--kind", sweep.kind, "data|inst|branch")->capture_default_str();
    cmd_sweep->add_option("--xs", sweep.xs, "ascending x values")->delimiter(',')->required();
    cmd_sweep->add_option("--iters", sweep.iterations, "iterations per point")
        ->capture_default_str();
    auto* sweep_seed = cmd_sweep->add_option("--seed", sweep.seed, "PRNG seed")->capture_default_str();
    cmd_sweep->add_option("--platform", sweep.platform, "platform preset")->capture_default_str();
    cmd_sweep->add_option("--prefetch", sweep.prefetch, "next-line prefetch on|off")
        ->capture_default_str();
    cmd_sweep->add_option("--theta", sweep.theta, "knee threshold multiplier")
        ->capture_default_str();
    cmd_sweep->add_option("-o,--out", sweep.out_csv, "sweep CSV path");
    cmd_sweep->add_option("--knee-out", sweep.knee_out, "knee report JSON path");
    cmd_sweep->add_flag("!--no-store", sweep.store_observations,
                        "skip storing per-point observations");

    FuseArgs fuse;
    auto* cmd_fuse = app.add_subcommand("fuse", "compute normalized impact factors");
    cmd_fuse->add_option("--workload", fuse.workload, "analyzed workload name")->required();
    cmd_fuse->add_option("--reference", fuse.reference, "reference workload name")->required();
    cmd_fuse->add_option("--family", fuse.family, "inst|data|branch")->capture_default_str();
    cmd_fuse->add_option("--config-label", fuse.config_label, "workload config label")
        ->capture_default_str();
    cmd_fuse->add_option("--reference-config", fuse.reference_config, "reference config label")
        ->capture_default_str();
    cmd_fuse->add_option("-o,--out", fuse.out, "impact report JSON path");

    BreakdownArgs breakdown;
    auto* cmd_breakdown = app.add_subcommand("breakdown", "hierarchical component attribution");
    cmd_breakdown->add_option("--impacts", breakdown.impacts_file, "impact report JSON from fuse")
        ->required();
    cmd_breakdown->add_option("--workload", breakdown.workload, "workload name")
        ->capture_default_str();
    cmd_breakdown->add_option("--family", breakdown.family, "inst|data|branch")
        ->capture_default_str();
    cmd_breakdown->add_option("--ir-trace", breakdown.ir_trace,
                              "trace whose tags split the IR impact");
    auto* full_opt = cmd_breakdown->add_option("--isa-full", breakdown.isa_full,
                                               "metric value with all components present");
    cmd_breakdown->add_option("--isa-ablated", breakdown.isa_ablated,
                              "metric value with the component removed")
        ->needs(full_opt);
    cmd_breakdown->add_option("--isa-component", breakdown.isa_component,
                              "name for the ablated component")
        ->capture_default_str();
    cmd_breakdown->add_option("--isa-residual", breakdown.isa_residual,
                              "name for the ISA residual")
        ->capture_default_str();
    cmd_breakdown->add_option("--uarch-trace", breakdown.uarch_trace,
                              "trace whose kernel share splits the UARCH impact");
    cmd_breakdown->add_option("--mpki", breakdown.mpki,
                              "emit a normalized-MPKI table for this MPKI");
    cmd_breakdown->add_option("-o,--out", breakdown.out, "tree report JSON path");
    cmd_breakdown->add_option("--csv", breakdown.csv_out, "flattened tree CSV path");

    CorrelateArgs correlate;
    auto* cmd_correlate = app.add_subcommand("correlate", "Pearson correlation across levels");
    cmd_correlate->add_option("--family", correlate.family, "inst|data|branch")
        ->capture_default_str();
    cmd_correlate->add_option("--levels", correlate.levels, "two levels, e.g. IR,UARCH")
        ->delimiter(',');
    cmd_correlate->add_option("--workloads", correlate.workloads, "workload names")
        ->delimiter(',')
        ->required();
    cmd_correlate->add_option("--config-label", correlate.config_label,
                              "restrict lookups to this config label");
    cmd_correlate->add_option("-o,--out", correlate.out, "correlation report JSON path");

    CalibrateArgs calibrate;
    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "choose the smallest x within the error threshold");
    cmd_calibrate->add_option("--kind", calibrate.kind, "data|inst|branch")->capture_default_str();
    cmd_calibrate->add_option("--candidates", calibrate.candidates, "ascending x candidates")
        ->delimiter(',')
        ->required();
    cmd_calibrate->add_option("--iters", calibrate.iterations, "iterations per candidate")
        ->capture_default_str();
    auto* calibrate_seed =
        cmd_calibrate->add_option("--seed", calibrate.seed, "PRNG seed")->capture_default_str();
    cmd_calibrate->add_option("--threshold", calibrate.threshold, "relative error threshold")
        ->capture_default_str();
    cmd_calibrate->add_option("--b", calibrate.b, "instructions per function body")
        ->capture_default_str();
    cmd_calibrate->add_option("--harness", calibrate.h, "harness instructions per iteration")
        ->capture_default_str();
    cmd_calibrate->add_option("--m", calibrate.m, "branch threshold range bound")
        ->capture_default_str();
    cmd_calibrate->add_option("-o,--out", calibrate.out, "calibration report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParameter;
    }

    if (global_seed_opt->count() > 0) {
        if (gen_seed->count() == 0) gen.cfg.seed = global_seed;
        if (sweep_seed->count() == 0) sweep.seed = global_seed;
        if (calibrate_seed->count() == 0) calibrate.seed = global_seed;
    }

    try {
        if (cmd_gen->parsed()) return run_gen_ref(global, gen);
        if (cmd_analyze->parsed()) return run_analyze(global, analyze);
        if (cmd_sim->parsed()) return run_simulate(global, sim);
        if (cmd_sweep->parsed()) return run_sweep(global, sweep);
        if (cmd_fuse->parsed()) return run_fuse(global, fuse);
        if (cmd_breakdown->parsed()) return run_breakdown(global, breakdown);
        if (cmd_correlate->parsed()) return run_correlate(global, correlate);
        if (cmd_calibrate->parsed()) return run_calibrate(global, calibrate);
    } catch (const wpc::MissingDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingData;
    } catch (const wpc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const wpc::Error& e) {
        // Parameter, format, schema, parse, corruption: bad input.
        std::cerr << "error: " << e.what() << "\n";
        return kExitParameter;
    }
    return kExitOk;
}
