#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flybs/simharness.hpp"

using namespace flybs;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny_config() {
    ScenarioConfig cfg;
    cfg.n_nodes = 8;
    cfg.duration_s = 20.0;
    cfg.n_drops = 1;
    cfg.seed = 5;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("zero duration yields an empty run and a header-only csv") {
    ScenarioConfig cfg = tiny_config();
    cfg.duration_s = 0.0;
    const RunResult result = run(cfg);
    CHECK(result.summary.aggregate.n_steps == 0.0);
    CHECK(result.trajectory.empty());

    const fs::path dir = fs::temp_directory_path() / "flybs_test_empty";
    fs::create_directories(dir);
    export_steps_csv((dir / "steps.csv").string(), result.trajectory);
    const std::string csv = slurp(dir / "steps.csv");
    CHECK(csv == "k,x,y,z,c_tot,min_c,iterations,feasible,p_pr,p_sum\n");
    fs::remove_all(dir);
}

TEST_CASE("tiny proposed run keeps every feasible step clean") {
    const ScenarioConfig cfg = tiny_config();
    const RunResult result = run(cfg);
    CHECK(result.summary.aggregate.n_steps == 20.0);
    CHECK(result.summary.aggregate.qos_violations == 0.0);
    CHECK(result.summary.aggregate.infeasible_steps == 0.0);
    for (const StepReport& r : result.trajectory) {
        CHECK(r.feasible);
        CHECK(r.slacks.power_sum_w <= cfg.p_max_total_w * (1.0 + 1e-9));
        CHECK(r.slacks.speed_ms <= cfg.v_max_ms * (1.0 + 1e-6));
        CHECK(r.position.z >= cfg.h_min_m - 1e-6);
        CHECK(r.position.z <= cfg.h_max_m + 1e-6);
    }
}

TEST_CASE("csv rows carry exactly the ten schema-v1 columns") {
    const ScenarioConfig cfg = tiny_config();
    const RunResult result = run(cfg);
    const fs::path dir = fs::temp_directory_path() / "flybs_test_cols";
    fs::create_directories(dir);
    export_steps_csv((dir / "steps.csv").string(), result.trajectory);
    std::ifstream in(dir / "steps.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 9);
        ++rows;
    }
    CHECK(rows == 21);  // header + 20 steps
    fs::remove_all(dir);
}

TEST_CASE("identical config and seed reproduce byte-identical exports") {
    const ScenarioConfig cfg = tiny_config();
    const fs::path dir = fs::temp_directory_path() / "flybs_test_repro";
    fs::create_directories(dir);
    for (int pass = 0; pass < 2; ++pass) {
        const RunResult result = run(cfg);
        export_steps_csv((dir / ("steps" + std::to_string(pass) + ".csv")).string(), result.trajectory);
        export_summary_json((dir / ("summary" + std::to_string(pass) + ".json")).string(), result.summary,
                            cfg);
        export_node_trajectories_csv((dir / ("traj" + std::to_string(pass) + ".csv")).string(),
                                     result.node_trajectory);
    }
    CHECK(slurp(dir / "steps0.csv") == slurp(dir / "steps1.csv"));
    CHECK(slurp(dir / "summary0.json") == slurp(dir / "summary1.json"));
    CHECK(slurp(dir / "traj0.csv") == slurp(dir / "traj1.csv"));
    CHECK(!slurp(dir / "traj0.csv").empty());
    fs::remove_all(dir);
}

TEST_CASE("multi-drop aggregate equals the mean of single-drop reruns") {
    ScenarioConfig cfg = tiny_config();
    cfg.n_drops = 3;
    const RunResult multi = run(cfg);
    double mean_capacity = 0.0, mean_iters = 0.0;
    for (int d = 0; d < 3; ++d) {
        const auto steps = run_drop(cfg, derive_drop_seed(cfg.seed, d));
        const DropSummary s = detail::summarize_drop(steps);
        CHECK(s == multi.summary.drops[d]);
        mean_capacity += s.mean_sum_capacity_bps / 3.0;
        mean_iters += s.mean_iterations / 3.0;
    }
    CHECK(multi.summary.aggregate.mean_sum_capacity_bps == doctest::Approx(mean_capacity).epsilon(1e-12));
    CHECK(multi.summary.aggregate.mean_iterations == doctest::Approx(mean_iters).epsilon(1e-12));
}

TEST_CASE("summary json round-trips") {
    ScenarioConfig cfg = tiny_config();
    cfg.n_drops = 2;
    const RunResult result = run(cfg);
    const fs::path dir = fs::temp_directory_path() / "flybs_test_json";
    fs::create_directories(dir);
    export_summary_json((dir / "summary.json").string(), result.summary, cfg);

    std::ifstream in(dir / "summary.json");
    nlohmann::json j;
    in >> j;
    const RunSummary parsed = j.get<RunSummary>();
    CHECK(parsed == result.summary);
    const ScenarioConfig cfg2 = j.at("config").get<ScenarioConfig>();
    CHECK(cfg2.n_nodes == cfg.n_nodes);
    CHECK(cfg2.seed == cfg.seed);
    CHECK(cfg2.qos_min_bps == cfg.qos_min_bps);
    fs::remove_all(dir);
}

TEST_CASE("config json round-trip and validation errors") {
    ScenarioConfig cfg = tiny_config();
    cfg.scheme = Scheme::EEEM;
    cfg.bandwidth_override_hz.assign(8, 2e6);
    nlohmann::json j = cfg;
    const ScenarioConfig back = j.get<ScenarioConfig>();
    CHECK(back.scheme == Scheme::EEEM);
    CHECK(back.bandwidth_override_hz == cfg.bandwidth_override_hz);
    CHECK(back.propulsion.tip_speed_ms == cfg.propulsion.tip_speed_ms);

    ScenarioConfig bad = tiny_config();
    bad.n_nodes = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.h_min_m = 500.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_config();
    bad.bandwidth_override_hz = {1e6};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(scheme_from_string("bogus"), ConfigError);
}

TEST_CASE("all four schemes run a short scenario") {
    for (Scheme s : {Scheme::Proposed, Scheme::MMC, Scheme::EEM, Scheme::EEEM}) {
        ScenarioConfig cfg = tiny_config();
        cfg.scheme = s;
        cfg.duration_s = 10.0;
        const RunResult result = run(cfg);
        CHECK(result.summary.aggregate.n_steps == 10.0);
        CHECK(result.summary.aggregate.qos_violations == 0.0);
        CHECK(result.summary.aggregate.mean_sum_capacity_bps > 0.0);
    }
}
