// End-to-end checks of the wpc binary: pipelines, report files, exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "testutil.hpp"
#include "wpc/json_io.hpp"
#include "wpc/refgen.hpp"
#include "wpc/store.hpp"
#include "wpc/trace_io.hpp"

using namespace wpc;
using nlohmann::json;

namespace {

std::string wpc_bin() {
    const char* bin = std::getenv("WPC_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "WPC_BIN must point at the wpc binary");
    return bin;
}

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args, const std::filesystem::path& scratch) {
    static int counter = 0;
    const auto out_file = scratch / ("out-" + std::to_string(counter++) + ".txt");
    const std::string cmd = wpc_bin() + " " + args + " >" + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

MetricObservation fixture_obs(const std::string& workload, Level level, Metric metric,
                              double value) {
    MetricObservation obs;
    obs.workload_name = workload;
    obs.level = level;
    obs.metric = metric;
    obs.config_label = "default";
    obs.value = value;
    obs.defined = true;
    obs.sample_count = 1000;
    return obs;
}

void seed_bayes_fixture(const std::filesystem::path& store_dir) {
    ProfileStore store(store_dir);
    store.put(fixture_obs("bayes", Level::IR, Metric::InstrReuseDist, 49086.0));
    store.put(fixture_obs("bayes", Level::ISA, Metric::InstrReuseDist, 8824.0));
    store.put(fixture_obs("bayes", Level::UARCH, Metric::L1I_MPKI, 16.9));
    store.put(fixture_obs("ref-inst", Level::IR, Metric::InstrReuseDist, 2040.0));
    store.put(fixture_obs("ref-inst", Level::ISA, Metric::InstrReuseDist, 2421.0));
    store.put(fixture_obs("ref-inst", Level::UARCH, Metric::L1I_MPKI, 0.43));
}

}  // namespace

TEST_CASE("gen-ref writes the trace and a sidecar with the prediction") {
    test::TempDir dir("wpc-cli");
    const auto trace_path = dir.path() / "ref.wpc";
    const auto result = run("gen-ref --kind inst --x 400 --iters 1000 --seed 7 -o " +
                                trace_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    const Trace trace = read_trace_file(trace_path);
    CHECK(trace.events.size() == 7000);
    CHECK(trace.seed == 7);
    const json sidecar = json::parse(slurp(trace_path.string() + ".json"));
    CHECK(sidecar["theoretical_prediction"] == 2000.0);
    CHECK(sidecar["config"]["x"] == 400);
}

TEST_CASE("gen-ref rejects a zero x for the data workload") {
    test::TempDir dir("wpc-cli");
    const auto result =
        run("gen-ref --kind data --x 0 --iters 10 -o " + (dir.path() / "t.wpc").string(),
            dir.path());
    CHECK(result.exit_code == 2);
}

TEST_CASE("gen-ref emits the jsonl mirror on request") {
    test::TempDir dir("wpc-cli");
    const auto path = dir.path() / "ref.jsonl";
    const auto result =
        run("gen-ref --kind branch --x 0 --iters 5 -o " + path.string(), dir.path());
    CHECK(result.exit_code == 0);
    const Trace trace = read_trace_jsonl_file(path);
    CHECK(trace.events.size() == 15);
    const json sidecar = json::parse(slurp(path.string() + ".json"));
    CHECK(sidecar["theoretical_prediction"] == 0.0);
}

TEST_CASE("analyze stores locality observations from a generated trace") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    const auto trace_path = dir.path() / "data.wpc";
    REQUIRE(run("gen-ref --kind data --x 50 --iters 20000 --seed 3 -o " + trace_path.string(),
                dir.path())
                .exit_code == 0);
    const auto result = run("--store " + store_dir.string() + " analyze --trace " +
                                trace_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    ProfileStore store(store_dir);
    const auto obs = store.get({"ref-data", Level::IR, Metric::DataReuseDist, "default"});
    REQUIRE(obs.has_value());
    REQUIRE(obs->defined);
    CHECK(std::abs(obs->value - 50.0) / 50.0 < 0.05);
    // The data workload has no branches: entropy is stored as undefined.
    const auto entropy = store.get({"ref-data", Level::IR, Metric::BranchEntropy, "default"});
    REQUIRE(entropy.has_value());
    CHECK_FALSE(entropy->defined);
}

TEST_CASE("analyzing an empty trace distinguishes no-data from failure") {
    test::TempDir dir("wpc-cli");
    Trace empty;
    const auto trace_path = dir.path() / "empty.wpc";
    write_trace_file(empty, trace_path);
    const auto result = run("--store " + (dir.path() / "store").string() + " analyze --trace " +
                                trace_path.string(),
                            dir.path());
    CHECK(result.exit_code == 3);
}

TEST_CASE("re-analyzing identical inputs stores identical bytes") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    const auto trace_path = dir.path() / "t.wpc";
    REQUIRE(run("gen-ref --kind inst --x 20 --iters 2000 --seed 9 -o " + trace_path.string(),
                dir.path())
                .exit_code == 0);
    const std::string analyze_cmd =
        "--store " + store_dir.string() + " analyze --trace " + trace_path.string();
    REQUIRE(run(analyze_cmd, dir.path()).exit_code == 0);
    const auto obs_file =
        store_dir / "obs" /
        ProfileStore::filename_for({"ref-inst", Level::IR, Metric::InstrReuseDist, "default"});
    const std::string first = slurp(obs_file);
    REQUIRE(run(analyze_cmd, dir.path()).exit_code == 0);
    CHECK(slurp(obs_file) == first);
}

TEST_CASE("analyze ingests counter CSVs") {
    test::TempDir dir("wpc-cli");
    const auto csv_path = dir.path() / "counters.csv";
    std::ofstream(csv_path)
        << "workload,instructions,l1i_misses,l1d_misses,branch_mispredictions,config\n"
        << "bayes,1000000,16900,12000,9000,default\n";
    const auto store_dir = dir.path() / "store";
    const auto result = run("--store " + store_dir.string() + " analyze --counters " +
                                csv_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    ProfileStore store(store_dir);
    const auto obs = store.get({"bayes", Level::UARCH, Metric::L1I_MPKI, "default"});
    REQUIRE(obs.has_value());
    CHECK(obs->value == doctest::Approx(16.9));
}

TEST_CASE("simulate rejects unknown platform presets, naming the known ones") {
    test::TempDir dir("wpc-cli");
    const auto trace_path = dir.path() / "t.wpc";
    REQUIRE(run("gen-ref --kind data --x 8 --iters 10 -o " + trace_path.string(), dir.path())
                .exit_code == 0);
    const auto result = run("simulate --trace " + trace_path.string() + " --platform nonesuch",
                            dir.path());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("gold5120t-like") != std::string::npos);
    CHECK(result.output.find("kunpeng920-like") != std::string::npos);
}

TEST_CASE("simulate stores mpki observations") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    const auto trace_path = dir.path() / "t.wpc";
    REQUIRE(run("gen-ref --kind data --x 100 --iters 20000 --seed 4 -o " + trace_path.string(),
                dir.path())
                .exit_code == 0);
    const auto report_path = dir.path() / "sim.json";
    const auto result = run("--store " + store_dir.string() + " simulate --trace " +
                                trace_path.string() + " --config-label lab -o " +
                                report_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    ProfileStore store(store_dir);
    const auto obs = store.get({"ref-data", Level::UARCH, Metric::L1D_MPKI, "lab"});
    REQUIRE(obs.has_value());
    CHECK(obs->defined);
    const json report = json::parse(slurp(report_path));
    CHECK(report["result"]["instructions"] == 60000);
}

TEST_CASE("fuse reproduces the worked example from the store") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    seed_bayes_fixture(store_dir);
    const auto impacts_path = dir.path() / "impacts.json";
    const auto result = run("--store " + store_dir.string() +
                                " --no-timestamp fuse --workload bayes --reference ref-inst "
                                "--family inst -o " +
                                impacts_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    const json report = json::parse(slurp(impacts_path));
    const auto& levels = report["impacts"]["levels"];
    REQUIRE(levels.size() == 3);
    CHECK(std::abs(levels[0]["impact"].get<double>() - 0.359) < 0.01);
    CHECK(std::abs(levels[1]["impact"].get<double>() - 0.054) < 0.01);
    CHECK(std::abs(levels[2]["impact"].get<double>() - 0.586) < 0.01);

    SUBCASE("reports without timestamps are reproducible byte for byte") {
        const auto second_path = dir.path() / "impacts2.json";
        REQUIRE(run("--store " + store_dir.string() +
                        " --no-timestamp fuse --workload bayes --reference ref-inst "
                        "--family inst -o " +
                        second_path.string(),
                    dir.path())
                    .exit_code == 0);
        CHECK(slurp(second_path) == slurp(impacts_path));
    }
}

TEST_CASE("fuse names the missing store key") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    ProfileStore store(store_dir);
    store.put(fixture_obs("bayes", Level::IR, Metric::InstrReuseDist, 49086.0));
    store.put(fixture_obs("bayes", Level::UARCH, Metric::L1I_MPKI, 16.9));
    store.put(fixture_obs("ref-inst", Level::IR, Metric::InstrReuseDist, 2040.0));
    // Reference lacks the UARCH entry.
    const auto result = run("--store " + store_dir.string() +
                                " fuse --workload bayes --reference ref-inst --family inst",
                            dir.path());
    CHECK(result.exit_code == 3);
    CHECK(result.output.find("ref-inst") != std::string::npos);
    CHECK(result.output.find("UARCH") != std::string::npos);
    CHECK(result.output.find("L1I_MPKI") != std::string::npos);
}

TEST_CASE("breakdown builds the published tree from fixture inputs") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    seed_bayes_fixture(store_dir);
    const auto impacts_path = dir.path() / "impacts.json";
    REQUIRE(run("--store " + store_dir.string() +
                    " fuse --workload bayes --reference ref-inst --family inst -o " +
                    impacts_path.string(),
                dir.path())
                .exit_code == 0);

    // IR split fixture: paired reuses with gap masses 611 (java) / 389 (mapreduce).
    Trace ir_trace;
    ir_trace.tag_table = {"untagged", "java-language", "mapreduce-framework"};
    std::uint64_t addr = 0x1000;
    auto add_pairs = [&](std::uint16_t tag, int pairs) {
        for (int i = 0; i < pairs; ++i) {
            TraceEvent e;
            e.kind = EventKind::Compute;
            e.instr_addr = addr;
            e.tag_id = tag;
            ir_trace.events.push_back(e);
            ir_trace.events.push_back(e);
            addr += 4;
        }
    };
    add_pairs(1, 611);
    add_pairs(2, 389);
    const auto ir_path = dir.path() / "ir.wpc";
    write_trace_file(ir_trace, ir_path);

    // UARCH split fixture: kernel share under the 0.001 reporting threshold.
    Trace uarch_trace = ir_trace;
    uarch_trace.events[1].kernel_mode = true;  // 1 of 1000 unit gaps
    for (std::size_t i = 0; i < uarch_trace.events.size(); ++i) {
        // Shift addresses so this reads as a distinct stream.
        uarch_trace.events[i].instr_addr += 0x100000;
    }
    const auto uarch_path = dir.path() / "uarch.wpc";
    write_trace_file(uarch_trace, uarch_path);

    const auto tree_path = dir.path() / "tree.json";
    const auto result = run("breakdown --impacts " + impacts_path.string() +
                                " --workload bayes --family inst --ir-trace " + ir_path.string() +
                                " --isa-full 100 --isa-ablated 90 --isa-component hadoop-daemons "
                                "--isa-residual jvm --uarch-trace " +
                                uarch_path.string() + " --mpki 16.9 -o " + tree_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    const json report = json::parse(slurp(tree_path));
    const BreakdownNode tree = breakdown_from_json(report["tree"].dump());
    REQUIRE(tree.children.size() == 3);

    double leaf_sum = 0;
    std::map<std::string, double> leaves;
    const auto walk = [&](const BreakdownNode& node, const auto& recurse) -> void {
        if (node.children.empty()) {
            leaves[node.name] = node.impact;
            leaf_sum += node.impact;
            return;
        }
        double child_sum = 0;
        for (const auto& child : node.children) child_sum += child.impact;
        CHECK(std::abs(child_sum - node.impact) < 1e-9);
        for (const auto& child : node.children) recurse(child, recurse);
    };
    walk(tree, walk);
    CHECK(std::abs(leaf_sum - 1.0) < 1e-6);
    CHECK(leaves["java-language"] == doctest::Approx(0.22).epsilon(0.01));
    CHECK(leaves["mapreduce-framework"] == doctest::Approx(0.14).epsilon(0.01));
    CHECK(leaves["hadoop-daemons"] == doctest::Approx(0.005).epsilon(0.05));
    CHECK(leaves["jvm"] == doctest::Approx(0.045).epsilon(0.05));
    CHECK(leaves["os-noise"] == 0.0);  // raw share 0.001 reports as zero
    CHECK(leaves["microarchitecture"] == doctest::Approx(0.586).epsilon(0.01));

    // The normalized-MPKI table rows sum back to the input MPKI.
    double mpki_sum = 0;
    for (const auto& row : report["normalized_mpki"]) mpki_sum += row["mpki"].get<double>();
    CHECK(mpki_sum == doctest::Approx(16.9).epsilon(1e-9));

    SUBCASE("the tree round-trips through its JSON form") {
        CHECK(to_json(breakdown_from_json(to_json(tree))) == to_json(tree));
    }
}

TEST_CASE("sweep needs at least four points") {
    test::TempDir dir("wpc-cli");
    const auto result = run("sweep --kind inst --xs 250 --iters 100", dir.path());
    CHECK(result.exit_code == 2);
}

TEST_CASE("sweep detects the instruction knee and correlate reads it back") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    const auto csv_path = dir.path() / "sweep.csv";
    const auto result = run("--store " + store_dir.string() +
                                " sweep --kind inst --xs 250,500,1000,2000 --iters 30000 --seed 7"
                                " -o " +
                                csv_path.string(),
                            dir.path());
    CHECK(result.exit_code == 0);
    const json report = json::parse(result.output);
    CHECK(report["knee_x"] == 1000);

    const std::string csv = slurp(csv_path);
    CHECK(csv.find("x,config,l1i_mpki,l1d_mpki,branch_mpki") == 0);
    CHECK(csv.find("\n250,") != std::string::npos);

    const auto corr = run("--store " + store_dir.string() +
                              " correlate --family inst --levels IR,UARCH --workloads "
                              "ref-inst-x250,ref-inst-x500,ref-inst-x1000,ref-inst-x2000",
                          dir.path());
    CHECK(corr.exit_code == 0);
    const json corr_report = json::parse(corr.output);
    CHECK(corr_report["defined"] == true);
    CHECK(corr_report["pearson"].get<double>() > 0.7);
}

TEST_CASE("correlate surfaces undefined correlations as a note") {
    test::TempDir dir("wpc-cli");
    const auto store_dir = dir.path() / "store";
    ProfileStore store(store_dir);
    for (const char* w : {"a", "b", "c"}) {
        store.put(fixture_obs(w, Level::IR, Metric::InstrReuseDist, 5.0));  // constant series
        store.put(fixture_obs(w, Level::UARCH, Metric::L1I_MPKI, 1.0 + w[0]));
    }
    const auto result = run("--store " + store_dir.string() +
                                " correlate --family inst --levels IR,UARCH --workloads a,b,c",
                            dir.path());
    CHECK(result.exit_code == 0);
    const json report = json::parse(result.output);
    CHECK(report["defined"] == false);
    CHECK(report.contains("note"));
}

TEST_CASE("calibrate reports the table and fails softly with no qualifier") {
    test::TempDir dir("wpc-cli");
    SUBCASE("qualifying candidates choose the smallest") {
        const auto result = run(
            "calibrate --kind data --candidates 8,16,32,64 --iters 20000 --seed 5", dir.path());
        CHECK(result.exit_code == 0);
        const json report = json::parse(result.output);
        CHECK(report["chosen_x"] == 8);
        CHECK(report["table"].size() == 4);
    }
    SUBCASE("an unreachable threshold yields the table and exit 3") {
        const auto result = run(
            "calibrate --kind data --candidates 8,16,32,64 --iters 5000 --seed 5 "
            "--threshold 0.0000001",
            dir.path());
        CHECK(result.exit_code == 3);
        const json report = json::parse(result.output);
        CHECK(report["chosen_x"].is_null());
        CHECK(report["table"].size() == 4);
    }
}
