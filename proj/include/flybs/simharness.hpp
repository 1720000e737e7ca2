#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "flybs/baselines.hpp"
#include "flybs/mobility.hpp"
#include "flybs/optimizer.hpp"
#include "flybs/scenario.hpp"

namespace flybs {

/// Aggregated metrics of one simulation drop.
struct DropSummary {
    double mean_sum_capacity_bps = 0.0;
    double final_sum_capacity_bps = 0.0;
    double mean_min_capacity_bps = 0.0;
    double qos_violations = 0.0;     // node-level violations over feasible steps
    double infeasible_steps = 0.0;
    double mean_iterations = 0.0;
    double mean_propulsion_w = 0.0;
    double n_steps = 0.0;

    bool operator==(const DropSummary&) const = default;
};

struct RunSummary {
    DropSummary aggregate;  // arithmetic mean over drops
    std::vector<DropSummary> drops;

    bool operator==(const RunSummary&) const = default;
};

struct TrajectoryRow {
    int k;
    int node_id;
    Vec3 position;
};

/// Output of run(): summary plus the step trace of the first drop.
struct RunResult {
    RunSummary summary;
    std::vector<StepReport> trajectory;          // drop 0
    std::vector<TrajectoryRow> node_trajectory;  // drop 0, when collected
};

inline std::uint64_t derive_drop_seed(std::uint64_t master, int drop) {
    // splitmix64 over master + drop index; drops stay independent and
    // reproducible.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(drop + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

inline DropSummary summarize_drop(const std::vector<StepReport>& steps) {
    DropSummary s;
    s.n_steps = static_cast<double>(steps.size());
    if (steps.empty()) return s;
    double sum_c = 0.0, sum_min = 0.0, sum_it = 0.0, sum_pr = 0.0;
    for (const StepReport& r : steps) {
        sum_c += r.sum_capacity_bps;
        sum_it += r.iterations;
        sum_pr += r.slacks.propulsion_w;
        double min_c = std::numeric_limits<double>::infinity();
        for (double c : r.capacity_bps) min_c = std::min(min_c, c);
        sum_min += std::isfinite(min_c) ? min_c : 0.0;
        if (!r.feasible) {
            s.infeasible_steps += 1.0;
            continue;
        }
        s.qos_violations += static_cast<double>(r.qos_violation_count);
    }
    s.mean_sum_capacity_bps = sum_c / s.n_steps;
    s.final_sum_capacity_bps = steps.back().sum_capacity_bps;
    s.mean_min_capacity_bps = sum_min / s.n_steps;
    s.mean_iterations = sum_it / s.n_steps;
    s.mean_propulsion_w = sum_pr / s.n_steps;
    return s;
}

}  // namespace detail

/// Run one seeded drop: mobility init, one relaxed-speed placement pass, then
/// duration/delta steps of move-then-optimize.
inline std::vector<StepReport> run_drop(const ScenarioConfig& cfg, std::uint64_t drop_seed,
                                        std::vector<TrajectoryRow>* node_trajectory = nullptr) {
    std::vector<NodeState> nodes = cfg.make_nodes();
    MobilityWorld world =
        make_scenario_mobility(nodes, cfg.arena_x_m, cfg.arena_y_m, drop_seed, cfg.node_z_m);

    const RegionLimits limits = cfg.region_limits();
    const OptimizerConfig opt = cfg.optimizer_config();
    const int n_steps = static_cast<int>(std::llround(cfg.duration_s / cfg.delta_s));

    // Initial state: node centroid at the floor altitude, equal power split,
    // then one optimization pass with the speed constraint relaxed.
    Vec3 q{};
    for (const NodeState& n : nodes) q += n.position;
    q = q / static_cast<double>(nodes.size());
    q.z = cfg.h_min_m;
    std::vector<double> p(nodes.size(), cfg.p_max_total_w / static_cast<double>(cfg.n_nodes));

    const Vec3 eem_position{cfg.arena_x_m / 2.0, cfg.arena_y_m / 2.0, 0.5 * (cfg.h_min_m + cfg.h_max_m)};

    RegionLimits relaxed = limits;
    relaxed.v_max = 1e6;
    relaxed.p_pr_th = 1e18;
    switch (cfg.scheme) {
        case Scheme::Proposed: {
            const StepReport init = step(q, p, nodes, opt, relaxed, 0);
            if (init.feasible) {
                q = init.position;
                p = init.power_w;
            }
            break;
        }
        case Scheme::MMC: {
            const StepReport init = mmc_step(q, p, nodes, opt, relaxed, 0, false);
            if (init.feasible) {
                q = init.position;
                p = init.power_w;
            }
            break;
        }
        case Scheme::EEM:
            q = eem_position;
            break;
        case Scheme::EEEM: {
            const StepReport init = eeem_step(q, nodes, relaxed, 0);
            if (init.feasible) {
                q = init.position;
                p = init.power_w;
            }
            break;
        }
    }

    std::vector<StepReport> steps;
    steps.reserve(static_cast<std::size_t>(n_steps));
    for (int k = 1; k <= n_steps; ++k) {
        advance(world, nodes, cfg.delta_s);
        if (node_trajectory) {
            for (const NodeState& n : nodes) node_trajectory->push_back({k, n.id, n.position});
        }
        StepReport rep;
        switch (cfg.scheme) {
            case Scheme::Proposed:
                rep = step(q, p, nodes, opt, limits, k);
                break;
            case Scheme::MMC:
                rep = mmc_step(q, p, nodes, opt, limits, k, cfg.mmc_speed_constrained);
                break;
            case Scheme::EEM:
                rep = eem_step(eem_position, nodes, limits, k);
                break;
            case Scheme::EEEM:
                rep = eeem_step(q, nodes, limits, k);
                break;
        }
        q = rep.position;
        if (rep.feasible && !rep.power_w.empty()) p = rep.power_w;
        steps.push_back(std::move(rep));
    }
    return steps;
}

/// Execute all drops and aggregate.
inline RunResult run(const ScenarioConfig& cfg) {
    cfg.validate();
    RunResult result;
    for (int d = 0; d < cfg.n_drops; ++d) {
        std::vector<TrajectoryRow>* traj = (d == 0) ? &result.node_trajectory : nullptr;
        std::vector<StepReport> steps = run_drop(cfg, derive_drop_seed(cfg.seed, d), traj);
        result.summary.drops.push_back(detail::summarize_drop(steps));
        if (d == 0) result.trajectory = std::move(steps);
    }
    DropSummary& agg = result.summary.aggregate;
    const double nd = static_cast<double>(cfg.n_drops);
    for (const DropSummary& s : result.summary.drops) {
        agg.mean_sum_capacity_bps += s.mean_sum_capacity_bps / nd;
        agg.final_sum_capacity_bps += s.final_sum_capacity_bps / nd;
        agg.mean_min_capacity_bps += s.mean_min_capacity_bps / nd;
        agg.qos_violations += s.qos_violations / nd;
        agg.infeasible_steps += s.infeasible_steps / nd;
        agg.mean_iterations += s.mean_iterations / nd;
        agg.mean_propulsion_w += s.mean_propulsion_w / nd;
        agg.n_steps += s.n_steps / nd;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Exports: schema v1 step CSV (10 columns) and a JSON summary.

inline constexpr int kCsvSchemaVersion = 1;

inline void export_steps_csv(const std::string& path, const std::vector<StepReport>& steps) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("export_steps_csv: cannot open '" + path + "' for writing");
    std::fputs("k,x,y,z,c_tot,min_c,iterations,feasible,p_pr,p_sum\n", f);
    for (const StepReport& r : steps) {
        double min_c = std::numeric_limits<double>::infinity();
        for (double c : r.capacity_bps) min_c = std::min(min_c, c);
        if (!std::isfinite(min_c)) min_c = 0.0;
        std::fprintf(f, "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%d,%.10g,%.10g\n", r.timestep, r.position.x,
                     r.position.y, r.position.z, r.sum_capacity_bps, min_c, r.iterations,
                     r.feasible ? 1 : 0, r.slacks.propulsion_w, r.slacks.power_sum_w);
    }
    std::fclose(f);
}

inline void export_node_trajectories_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("export_node_trajectories_csv: cannot open '" + path + "'");
    std::fputs("k,node_id,x,y,z\n", f);
    for (const TrajectoryRow& r : rows)
        std::fprintf(f, "%d,%d,%.10g,%.10g,%.10g\n", r.k, r.node_id, r.position.x, r.position.y,
                     r.position.z);
    std::fclose(f);
}

inline void to_json(nlohmann::json& j, const DropSummary& s) {
    j = nlohmann::json{{"mean_sum_capacity_bps", s.mean_sum_capacity_bps},
                       {"final_sum_capacity_bps", s.final_sum_capacity_bps},
                       {"mean_min_capacity_bps", s.mean_min_capacity_bps},
                       {"qos_violations", s.qos_violations},
                       {"infeasible_steps", s.infeasible_steps},
                       {"mean_iterations", s.mean_iterations},
                       {"mean_propulsion_w", s.mean_propulsion_w},
                       {"n_steps", s.n_steps}};
}

inline void from_json(const nlohmann::json& j, DropSummary& s) {
    j.at("mean_sum_capacity_bps").get_to(s.mean_sum_capacity_bps);
    j.at("final_sum_capacity_bps").get_to(s.final_sum_capacity_bps);
    j.at("mean_min_capacity_bps").get_to(s.mean_min_capacity_bps);
    j.at("qos_violations").get_to(s.qos_violations);
    j.at("infeasible_steps").get_to(s.infeasible_steps);
    j.at("mean_iterations").get_to(s.mean_iterations);
    j.at("mean_propulsion_w").get_to(s.mean_propulsion_w);
    j.at("n_steps").get_to(s.n_steps);
}

inline void to_json(nlohmann::json& j, const RunSummary& s) {
    j = nlohmann::json{{"schema_version", kCsvSchemaVersion}, {"aggregate", s.aggregate}, {"drops", s.drops}};
}

inline void from_json(const nlohmann::json& j, RunSummary& s) {
    j.at("aggregate").get_to(s.aggregate);
    j.at("drops").get_to(s.drops);
}

inline void export_summary_json(const std::string& path, const RunSummary& summary,
                                const ScenarioConfig& cfg) {
    nlohmann::json j;
    to_json(j, summary);
    j["config"] = cfg;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_summary_json: cannot open '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace flybs
