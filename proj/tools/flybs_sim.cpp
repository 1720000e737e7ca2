// Command-line front end: run simulations, parameter sweeps and standalone
// feasibility checks. Exit codes: 0 success, 2 config error, 3 infeasible
// snapshot.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flybs/feasibility.hpp"
#include "flybs/scenario.hpp"
#include "flybs/simharness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;

flybs::ScenarioConfig load_config(const std::string& path) {
    flybs::ScenarioConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw flybs::ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw flybs::ConfigError("config parse error in '" + path + "': " + e.what());
    }
    try {
        cfg = j.get<flybs::ScenarioConfig>();
    } catch (const json::exception& e) {
        throw flybs::ConfigError("config field error in '" + path + "': " + e.what());
    }
    return cfg;
}

struct Overrides {
    std::string scheme;
    int n_nodes = -1;
    double cmin = -1.0;
    std::int64_t seed = -1;
    int drops = -1;
    double duration = -1.0;
};

void apply_overrides(flybs::ScenarioConfig& cfg, const Overrides& ov) {
    if (!ov.scheme.empty()) cfg.scheme = flybs::scheme_from_string(ov.scheme);
    if (ov.n_nodes >= 0) cfg.n_nodes = ov.n_nodes;
    if (ov.cmin >= 0.0) cfg.qos_min_bps = ov.cmin;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (ov.drops >= 0) cfg.n_drops = ov.drops;
    if (ov.duration >= 0.0) cfg.duration_s = ov.duration;
}

void write_outputs(const flybs::RunResult& result, const flybs::ScenarioConfig& cfg, const std::string& out_dir,
                   bool export_trajectories) {
    fs::create_directories(out_dir);
    flybs::export_steps_csv((fs::path(out_dir) / "steps_drop0.csv").string(), result.trajectory);
    flybs::export_summary_json((fs::path(out_dir) / "summary.json").string(), result.summary, cfg);
    if (export_trajectories) {
        flybs::export_node_trajectories_csv((fs::path(out_dir) / "trajectories.csv").string(),
                                            result.node_trajectory);
    }
}

int run_simulate(const std::string& config_path, const Overrides& ov, const std::string& out_dir,
                 bool export_trajectories) {
    flybs::ScenarioConfig cfg = load_config(config_path);
    apply_overrides(cfg, ov);
    cfg.validate();
    const flybs::RunResult result = flybs::run(cfg);
    if (!out_dir.empty()) write_outputs(result, cfg, out_dir, export_trajectories);
    const flybs::DropSummary& a = result.summary.aggregate;
    std::printf("scheme=%s nodes=%d drops=%d steps=%g mean_sum_capacity=%.6g bps "
                "mean_min_capacity=%.6g bps qos_violations=%g infeasible_steps=%g mean_iters=%.3g\n",
                flybs::to_string(cfg.scheme).c_str(), cfg.n_nodes, cfg.n_drops, a.n_steps,
                a.mean_sum_capacity_bps, a.mean_min_capacity_bps, a.qos_violations, a.infeasible_steps,
                a.mean_iterations);
    return kExitOk;
}

int run_sweep(const std::string& config_path, const Overrides& ov, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir) {
    if (param != "n_nodes" && param != "cmin")
        throw flybs::ConfigError("sweep: --param must be n_nodes or cmin");
    if (values.empty()) throw flybs::ConfigError("sweep: --values must not be empty");
    if (!out_dir.empty()) fs::create_directories(out_dir);

    std::string rows = "param,value,mean_sum_capacity_bps,mean_min_capacity_bps,qos_violations,"
                       "infeasible_steps,mean_iterations\n";
    for (double v : values) {
        flybs::ScenarioConfig cfg = load_config(config_path);
        apply_overrides(cfg, ov);
        if (param == "n_nodes")
            cfg.n_nodes = static_cast<int>(v);
        else
            cfg.qos_min_bps = v;
        cfg.validate();
        const flybs::RunResult result = flybs::run(cfg);
        const flybs::DropSummary& a = result.summary.aggregate;
        char buf[512];
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", param.c_str(), v,
                      a.mean_sum_capacity_bps, a.mean_min_capacity_bps, a.qos_violations,
                      a.infeasible_steps, a.mean_iterations);
        rows += buf;
        if (!out_dir.empty()) {
            std::ostringstream name;
            name << "summary_" << param << "_" << v << ".json";
            flybs::export_summary_json((fs::path(out_dir) / name.str()).string(), result.summary, cfg);
        }
        std::printf("%s=%g mean_sum_capacity=%.6g bps infeasible_steps=%g\n", param.c_str(), v,
                    a.mean_sum_capacity_bps, a.infeasible_steps);
    }
    if (!out_dir.empty()) {
        std::ofstream out(fs::path(out_dir) / "sweep.csv", std::ios::binary);
        out << rows;
    }
    return kExitOk;
}

int run_feasibility_check(const std::string& snapshot_path) {
    std::ifstream in(snapshot_path);
    if (!in) throw flybs::ConfigError("cannot open snapshot file '" + snapshot_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw flybs::ConfigError("snapshot parse error: " + std::string(e.what()));
    }

    flybs::ScenarioConfig cfg;
    if (j.contains("config")) cfg = j.at("config").get<flybs::ScenarioConfig>();

    if (!j.contains("node_positions") || !j.contains("power") || !j.contains("q_prev"))
        throw flybs::ConfigError("snapshot needs q_prev, power and node_positions");
    const auto positions = j.at("node_positions").get<std::vector<std::vector<double>>>();
    const auto power = j.at("power").get<std::vector<double>>();
    const auto qp = j.at("q_prev").get<std::vector<double>>();
    if (qp.size() != 3) throw flybs::ConfigError("snapshot: q_prev must be [x,y,z]");
    if (positions.size() != power.size())
        throw flybs::ConfigError("snapshot: power and node_positions size mismatch");

    cfg.n_nodes = static_cast<int>(positions.size());
    if (j.contains("qos_min_bps")) cfg.qos_min_bps = j.at("qos_min_bps").get<double>();
    std::vector<flybs::NodeState> nodes = cfg.make_nodes();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i].size() != 3) throw flybs::ConfigError("snapshot: node position must be [x,y,z]");
        nodes[i].position = {positions[i][0], positions[i][1], positions[i][2]};
    }

    const flybs::Vec3 q_prev{qp[0], qp[1], qp[2]};
    const flybs::ConstraintRegion region = flybs::build_region(q_prev, nodes, power, cfg.region_limits());
    const flybs::FeasibilityResult res = flybs::is_feasible(region);

    json out;
    out["feasible"] = res.feasible;
    if (res.feasible)
        out["witness"] = {res.witness.x, res.witness.y, res.witness.z};
    else
        out["reason"] = res.reason;
    std::cout << out.dump(2) << "\n";
    return res.feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FlyBS sum-capacity positioning and power allocation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, snapshot_path, sweep_param;
    std::vector<double> sweep_values;
    bool export_trajectories = false;
    Overrides ov;

    CLI::App* sim = app.add_subcommand("simulate", "Run one scenario");
    sim->add_option("--config", config_path, "Scenario config JSON");
    sim->add_option("--scheme", ov.scheme, "proposed|mmc|eem|eeem");
    sim->add_option("--n-nodes", ov.n_nodes, "Number of nodes");
    sim->add_option("--cmin", ov.cmin, "Per-node minimum capacity, bit/s");
    sim->add_option("--seed", ov.seed, "Master seed");
    sim->add_option("--drops", ov.drops, "Simulation drops");
    sim->add_option("--duration", ov.duration, "Duration, seconds");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_flag("--export-trajectories", export_trajectories, "Write node trajectories CSV");

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter");
    sweep->add_option("--config", config_path, "Scenario config JSON");
    sweep->add_option("--param", sweep_param, "n_nodes|cmin")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--scheme", ov.scheme, "proposed|mmc|eem|eeem");
    sweep->add_option("--seed", ov.seed, "Master seed");
    sweep->add_option("--drops", ov.drops, "Simulation drops");
    sweep->add_option("--duration", ov.duration, "Duration, seconds");
    sweep->add_option("--out", out_dir, "Output directory");

    CLI::App* feas = app.add_subcommand("feasibility-check", "Check one region snapshot");
    feas->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(config_path, ov, out_dir, export_trajectories);
        if (sweep->parsed()) return run_sweep(config_path, ov, sweep_param, sweep_values, out_dir);
        if (feas->parsed()) return run_feasibility_check(snapshot_path);
    } catch (const flybs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
