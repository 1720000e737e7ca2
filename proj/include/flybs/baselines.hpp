#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "flybs/optimizer.hpp"

namespace flybs {

enum class BaselineKind { MMC, EEM, EEEM };

namespace detail {

/// QoS power floor sum for a uniform capacity target c.
inline double floor_sum_at_target(const Vec3& q, std::span<const NodeState> nodes, double c_bps) {
    double total = 0.0;
    for (const NodeState& n : nodes) {
        const ChannelParams& ch = n.channel;
        const double snr_min = std::exp2(c_bps / ch.bandwidth_hz) - 1.0;
        total += std::pow(q.distance(n.position), ch.pathloss_exp) * (ch.noise_power_w + ch.interference_w) *
                 snr_min / ch.gain_coeff;
    }
    return total;
}

/// Floor vector at target c, scaled up to exhaust the budget (equal split
/// when the floors are all zero). Scaling keeps per-node capacities equal
/// for equal-bandwidth nodes.
inline std::vector<double> scaled_floor_allocation(const Vec3& q, std::span<const NodeState> nodes,
                                                   double c_bps, double p_max_total) {
    const std::size_t n = nodes.size();
    std::vector<double> p(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const ChannelParams& ch = nodes[i].channel;
        const double snr_min = std::exp2(c_bps / ch.bandwidth_hz) - 1.0;
        p[i] = std::pow(q.distance(nodes[i].position), ch.pathloss_exp) *
               (ch.noise_power_w + ch.interference_w) * snr_min / ch.gain_coeff;
        sum += p[i];
    }
    if (sum <= 0.0) {
        std::fill(p.begin(), p.end(), p_max_total / static_cast<double>(n));
        return p;
    }
    const double scale = p_max_total / sum;
    if (scale > 1.0)
        for (double& v : p) v *= scale;
    return p;
}

/// Largest uniform capacity target whose floors fit the budget at q.
inline double mmc_bisect_target(const Vec3& q, std::span<const NodeState> nodes, double p_max_total) {
    // The minimum capacity cannot beat handing the whole budget to the
    // weakest node.
    double c_hi = std::numeric_limits<double>::infinity();
    for (const NodeState& n : nodes)
        c_hi = std::min(c_hi, node_capacity(q, n, p_max_total));
    if (!(c_hi > 0.0)) return 0.0;
    if (floor_sum_at_target(q, nodes, c_hi) <= p_max_total) return c_hi;
    double c_lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (c_lo + c_hi);
        if (floor_sum_at_target(q, nodes, mid) <= p_max_total)
            c_lo = mid;
        else
            c_hi = mid;
    }
    return c_lo;
}

inline std::vector<NodeState> with_uniform_target(std::span<const NodeState> nodes, double c_bps) {
    std::vector<NodeState> out(nodes.begin(), nodes.end());
    for (NodeState& n : out) n.qos_min_bps = c_bps;
    return out;
}

/// Dinkelbach loop for max C_tot(p) / sum(p) under floors and the cap.
inline std::vector<double> eem_allocate(const AllocationProblem& prob) {
    constexpr double kLn2 = 0.6931471805599453;
    std::vector<double> p = allocate(prob);
    double total_p = std::accumulate(p.begin(), p.end(), 0.0);
    if (total_p <= 0.0) return p;

    for (int it = 0; it < 100; ++it) {
        const double value = allocation_objective(prob, p);
        const double eta = value / total_p;
        std::vector<double> cand(prob.size());
        double cand_sum = 0.0;
        for (std::size_t i = 0; i < prob.size(); ++i) {
            const double unconstrained = prob.bandwidth_hz[i] / (eta * kLn2) - 1.0 / prob.link_gain[i];
            cand[i] = std::max(prob.floor_w[i], unconstrained);
            cand_sum += cand[i];
        }
        if (cand_sum > prob.p_max_total_w) cand = allocate(prob);
        const double f = allocation_objective(prob, cand) -
                         eta * std::accumulate(cand.begin(), cand.end(), 0.0);
        p = cand;
        total_p = std::accumulate(p.begin(), p.end(), 0.0);
        if (std::abs(f) <= 1e-6 * std::max(1.0, value) || total_p <= 0.0) break;
    }
    return p;
}

inline StepReport make_baseline_report(int timestep, const Vec3& q, const Vec3& q_prev,
                                       std::span<const NodeState> nodes, std::span<const double> p,
                                       const RegionLimits& limits, int iterations) {
    StepReport rep;
    rep.timestep = timestep;
    rep.position = q;
    rep.power_w.assign(p.begin(), p.end());
    rep.iterations = iterations;
    rep.feasible = true;
    rep.capacity_bps.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        rep.capacity_bps[i] = node_capacity(q, nodes[i], p[i]);
    rep.sum_capacity_bps = std::accumulate(rep.capacity_bps.begin(), rep.capacity_bps.end(), 0.0);
    rep.iter_sum_capacity.push_back(rep.sum_capacity_bps);
    rep.qos_violation_count = count_qos_violations(nodes, rep.capacity_bps);
    rep.slacks = compute_slacks(q, q_prev, nodes, p, limits);
    return rep;
}

}  // namespace detail

/// Max-min capacity baseline: bisect the largest common capacity target
/// whose floors fit the budget, then steer toward the required-power
/// centroid with the same constrained-positioning machinery.
inline StepReport mmc_step(const Vec3& q_prev, std::span<const double> /*p_prev*/,
                           std::span<const NodeState> nodes, const OptimizerConfig& cfg,
                           const RegionLimits& limits, int timestep = 0, bool speed_constrained = true) {
    RegionLimits lim = limits;
    if (!speed_constrained) {
        lim.v_max = 1e6;
        lim.p_pr_th = 1e18;
    }
    lim.sigma = cfg.sigma;

    Vec3 q = q_prev;
    double target = 0.0;
    int iters = 0;
    while (iters < cfg.max_iters) {
        ++iters;
        target = detail::mmc_bisect_target(q, nodes, lim.p_max_total);
        const std::vector<NodeState> tnodes = detail::with_uniform_target(nodes, target);
        const std::vector<double> p = detail::scaled_floor_allocation(q, nodes, target, lim.p_max_total);
        const ConstraintRegion region = build_region(q_prev, tnodes, p, lim);
        const FeasibilityResult feas = is_feasible(region);
        if (!feas.feasible) {
            if (iters == 1)
                return detail::infeasible_report(timestep, q_prev, nodes, lim, q_prev, feas.reason);
            break;
        }
        RadialApprox toward_centroid;
        toward_centroid.s0 = region.power_bound.vacuous ? q : region.power_bound.theta0;
        toward_centroid.zeta = 1.0;
        toward_centroid.anchor = q;
        const PositionUpdateResult upd = position_update(toward_centroid, region, feas.witness);
        const double displacement = upd.position.distance(q);
        q = upd.position;
        if (displacement < cfg.epsilon_m) break;
    }

    target = detail::mmc_bisect_target(q, nodes, lim.p_max_total);
    const std::vector<double> p = detail::scaled_floor_allocation(q, nodes, target, lim.p_max_total);
    const std::vector<NodeState> tnodes = detail::with_uniform_target(nodes, target);
    StepReport rep = detail::make_baseline_report(timestep, q, q_prev, tnodes, p, lim, iters);
    return rep;
}

/// Energy-efficiency baseline: power allocation only, at a fixed position.
inline StepReport eem_step(const Vec3& q_fixed, std::span<const NodeState> nodes, const RegionLimits& limits,
                           int timestep = 0) {
    const double floors = required_power_sum(q_fixed, nodes);
    if (floors > limits.p_max_total) {
        return detail::infeasible_report(timestep, q_fixed, nodes, limits, q_fixed,
                                         "QoS power floors exceed the budget at the fixed position");
    }
    const AllocationProblem prob = make_allocation_problem(q_fixed, nodes, limits.p_max_total);
    const std::vector<double> p = detail::eem_allocate(prob);
    return detail::make_baseline_report(timestep, q_fixed, q_fixed, nodes, p, limits, 1);
}

/// EEM extended with single-cluster K-means positioning: move toward the
/// node centroid (clipped into the admissible speed band and the slab), then
/// allocate for energy efficiency there.
inline StepReport eeem_step(const Vec3& q_prev, std::span<const NodeState> nodes, const RegionLimits& limits,
                            int timestep = 0) {
    Vec3 centroid{};
    for (const NodeState& n : nodes) centroid += n.position;
    centroid = centroid / static_cast<double>(nodes.size());
    centroid.z = std::clamp(centroid.z, limits.h_min, limits.h_max);
    const Vec3 q = detail::clipped_hold_position(q_prev, centroid, limits);

    const double floors = required_power_sum(q, nodes);
    if (floors > limits.p_max_total) {
        return detail::infeasible_report(timestep, q, nodes, limits, q_prev,
                                         "QoS power floors exceed the budget at the centroid position");
    }
    const AllocationProblem prob = make_allocation_problem(q, nodes, limits.p_max_total);
    const std::vector<double> p = detail::eem_allocate(prob);
    StepReport rep = detail::make_baseline_report(timestep, q, q_prev, nodes, p, limits, 1);
    return rep;
}

}  // namespace flybs
