#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"
#include "flybs/feasibility.hpp"
#include "flybs/positioning.hpp"
#include "flybs/power_alloc.hpp"
#include "flybs/propulsion.hpp"

namespace flybs {

struct OptimizerConfig {
    double epsilon_m = 0.1;  // displacement convergence threshold
    int max_iters = 10;
    double sigma = 0.05;
    double xi = 0.05;
    bool monotonicity_guard = true;

    void validate() const {
        if (!(epsilon_m > 0.0)) throw ConfigError("optimizer: epsilon must be > 0");
        if (max_iters < 1) throw ConfigError("optimizer: max_iters must be >= 1");
        if (!(sigma > 0.0) || !(xi > 0.0)) throw ConfigError("optimizer: sigma and xi must be > 0");
    }
};

/// Constraint slack summary from a direct recheck of (the exact) constraints.
struct StepSlacks {
    double min_qos_rel = 0.0;      // min_i (C_i - C_i^min) / max(C_i^min, 1)
    double speed_ms = 0.0;         // realized speed
    double altitude_m = 0.0;       // realized altitude
    double propulsion_w = 0.0;     // realized propulsion power
    double power_sum_w = 0.0;      // realized total transmit power
};

struct StepReport {
    int timestep = 0;
    Vec3 position;
    std::vector<double> power_w;
    std::vector<double> capacity_bps;
    double sum_capacity_bps = 0.0;
    int iterations = 0;
    bool feasible = false;
    std::string infeasible_reason;
    bool position_fallback = false;
    int qos_violation_count = 0;  // nodes below their floor (1e-6 relative)
    StepSlacks slacks;
    std::vector<double> iter_sum_capacity;  // exact objective after each inner iteration
};

namespace detail {

inline int count_qos_violations(std::span<const NodeState> nodes, std::span<const double> capacities) {
    int count = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (capacities[i] < nodes[i].qos_min_bps * (1.0 - 1e-6)) ++count;
    return count;
}

inline StepSlacks compute_slacks(const Vec3& q, const Vec3& q_prev, std::span<const NodeState> nodes,
                                 std::span<const double> p, const RegionLimits& limits) {
    StepSlacks s;
    s.speed_ms = q.distance(q_prev) / limits.delta_s;
    s.altitude_m = q.z;
    s.propulsion_w = propulsion_power(s.speed_ms, limits.propulsion);
    s.power_sum_w = std::accumulate(p.begin(), p.end(), 0.0);
    s.min_qos_rel = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double c = node_capacity(q, nodes[i], p[i]);
        const double rel = (c - nodes[i].qos_min_bps) / std::max(nodes[i].qos_min_bps, 1.0);
        s.min_qos_rel = std::min(s.min_qos_rel, rel);
    }
    return s;
}

/// Grant floors by descending deficit until the budget runs out; used only
/// on infeasible timesteps.
inline std::vector<double> priority_floor_allocation(const Vec3& q, std::span<const NodeState> nodes,
                                                     double p_max_total) {
    const std::size_t n = nodes.size();
    std::vector<double> floors(n);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        floors[i] = qos_floor(nodes[i], q.distance(nodes[i].position));
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (floors[a] != floors[b]) return floors[a] > floors[b];
        return a < b;
    });
    std::vector<double> p(n, 0.0);
    double budget = p_max_total;
    for (std::size_t idx : order) {
        if (floors[idx] <= budget) {
            p[idx] = floors[idx];
            budget -= floors[idx];
        }
    }
    return p;
}

/// Recovery move for an infeasible entry: hold position, clipped into the
/// admissible speed annulus toward the required-power centroid.
inline Vec3 clipped_hold_position(const Vec3& q_prev, const Vec3& theta0, const RegionLimits& limits) {
    double v_lo = 0.0, v_hi = 0.0;
    try {
        const SpeedInterval si = speed_interval(limits.p_pr_th, limits.v_max, limits.propulsion);
        v_lo = si.v_lo;
        v_hi = si.v_hi;
    } catch (const SpeedInfeasible&) {
        return q_prev;  // nothing admissible; stay put and report
    }
    Vec3 target = theta0;
    target.z = std::clamp(target.z, limits.h_min, limits.h_max);
    const Vec3 d = target - q_prev;
    const double dist = d.norm();
    const double lo = v_lo * limits.delta_s;
    const double hi = v_hi * limits.delta_s;
    const double move = std::clamp(dist, lo, hi);
    Vec3 q = dist > kGeomTol ? q_prev + d * (move / dist) : q_prev + Vec3{move, 0.0, 0.0};
    q.z = std::clamp(q.z, limits.h_min, limits.h_max);
    return q;
}

inline StepReport infeasible_report(int timestep, const Vec3& q, std::span<const NodeState> nodes,
                                    const RegionLimits& limits, const Vec3& q_prev, const std::string& reason) {
    StepReport rep;
    rep.timestep = timestep;
    rep.position = q;
    rep.feasible = false;
    rep.infeasible_reason = reason;
    rep.iterations = 1;
    rep.power_w = priority_floor_allocation(q, nodes, limits.p_max_total);
    rep.capacity_bps.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        rep.capacity_bps[i] = node_capacity(q, nodes[i], rep.power_w[i]);
    rep.sum_capacity_bps = std::accumulate(rep.capacity_bps.begin(), rep.capacity_bps.end(), 0.0);
    rep.iter_sum_capacity.push_back(rep.sum_capacity_bps);
    rep.qos_violation_count = count_qos_violations(nodes, rep.capacity_bps);
    rep.slacks = compute_slacks(q, q_prev, nodes, rep.power_w, limits);
    return rep;
}

}  // namespace detail

/// One timestep of the alternating optimization: water-filling power
/// allocation at the current position, then a surrogate-guided position
/// update inside the constraint region, repeated until the displacement
/// falls below epsilon or the iteration cap.
inline StepReport step(const Vec3& q_prev, std::span<const double> p_prev, std::span<const NodeState> nodes,
                       const OptimizerConfig& cfg, const RegionLimits& limits, int timestep = 0) {
    cfg.validate();
    limits.validate();
    if (nodes.empty()) throw std::invalid_argument("step: no nodes");

    RegionLimits region_limits = limits;
    region_limits.sigma = cfg.sigma;

    Vec3 q = q_prev;
    // Entry feasibility of the power floors; when the budget cannot cover
    // them here, probe the clipped move toward theta0 before giving up.
    if (required_power_sum(q, nodes) > limits.p_max_total) {
        const PowerBoundQuantities lq =
            build_power_bound(q_prev, nodes, limits.h_min, cfg.sigma, limits.p_max_total);
        const Vec3 recovery = detail::clipped_hold_position(q_prev, lq.vacuous ? q_prev : lq.theta0, limits);
        if (required_power_sum(recovery, nodes) > limits.p_max_total) {
            return detail::infeasible_report(timestep, recovery, nodes, limits, q_prev,
                                             "QoS power floors exceed the budget at every probed position");
        }
        q = recovery;
    }

    StepReport rep;
    rep.timestep = timestep;
    std::vector<double> p(p_prev.begin(), p_prev.end());
    bool fallback_used = false;
    int iters = 0;
    double current_value = -1.0;

    while (iters < cfg.max_iters) {
        ++iters;
        p = allocate(make_allocation_problem(q, nodes, limits.p_max_total));
        current_value = sum_capacity(q, nodes, p);

        const ConstraintRegion region = build_region(q_prev, nodes, p, region_limits);
        const FeasibilityResult feas = is_feasible(region);
        if (!feas.feasible) {
            if (iters == 1) {
                const Vec3 recovery = detail::clipped_hold_position(
                    q_prev, region.power_bound.vacuous ? q_prev : region.power_bound.theta0, limits);
                return detail::infeasible_report(timestep, recovery, nodes, limits, q_prev, feas.reason);
            }
            rep.iter_sum_capacity.push_back(current_value);
            break;
        }

        const RadialApprox approx = build_radial_approx(q, nodes, p, cfg.sigma, cfg.xi, limits.h_min);
        const PositionUpdateResult upd = position_update(approx, region, feas.witness);
        fallback_used = fallback_used || upd.used_fallback;

        const double moved_value = sum_capacity(upd.position, nodes, p);
        if (cfg.monotonicity_guard && moved_value < current_value * (1.0 - 1e-9) &&
            region.contains(q, 1e-6)) {
            rep.iter_sum_capacity.push_back(current_value);
            break;  // surrogate suggested a downhill move; staying is legal, so stay
        }

        const double displacement = upd.position.distance(q);
        q = upd.position;
        current_value = moved_value;
        rep.iter_sum_capacity.push_back(current_value);
        if (displacement < cfg.epsilon_m) break;
    }

    // Final allocation at the settled position.
    p = allocate(make_allocation_problem(q, nodes, limits.p_max_total));

    rep.position = q;
    rep.power_w = p;
    rep.iterations = iters;
    rep.feasible = true;
    rep.position_fallback = fallback_used;
    rep.capacity_bps.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        rep.capacity_bps[i] = node_capacity(q, nodes[i], p[i]);
    rep.sum_capacity_bps = std::accumulate(rep.capacity_bps.begin(), rep.capacity_bps.end(), 0.0);
    if (!rep.iter_sum_capacity.empty())
        rep.iter_sum_capacity.back() = std::max(rep.iter_sum_capacity.back(), rep.sum_capacity_bps);
    rep.qos_violation_count = detail::count_qos_violations(nodes, rep.capacity_bps);
    rep.slacks = detail::compute_slacks(q, q_prev, nodes, p, limits);
    return rep;
}

}  // namespace flybs
