#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"

namespace flybs {

/// Separable concave power-split problem at a fixed FlyBS position:
/// maximize sum of B_i log2(1 + a_i p_i) subject to per-node floors and the
/// total power cap.
struct AllocationProblem {
    std::vector<double> link_gain;     // a_i = Q_i d_i^-alpha / (N_i + I), 1/W
    std::vector<double> floor_w;       // p_i^min
    std::vector<double> bandwidth_hz;  // B_i
    double p_max_total_w = 1.0;

    std::size_t size() const { return link_gain.size(); }
};

/// Minimum transmit power for node at distance d to exactly meet its QoS floor.
inline double qos_floor(const NodeState& node, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("qos_floor: distance must be > 0");
    if (node.qos_min_bps <= 0.0) return 0.0;
    const ChannelParams& ch = node.channel;
    const double snr_min = std::exp2(node.qos_min_bps / ch.bandwidth_hz) - 1.0;
    return std::pow(distance_m, ch.pathloss_exp) * (ch.noise_power_w + ch.interference_w) * snr_min / ch.gain_coeff;
}

/// Sum of QoS power floors at position q; the exact left side of the
/// total-power necessary condition.
inline double required_power_sum(const Vec3& q, std::span<const NodeState> nodes) {
    double total = 0.0;
    for (const NodeState& n : nodes) total += qos_floor(n, q.distance(n.position));
    return total;
}

inline AllocationProblem make_allocation_problem(const Vec3& q, std::span<const NodeState> nodes,
                                                 double p_max_total_w) {
    AllocationProblem prob;
    prob.p_max_total_w = p_max_total_w;
    prob.link_gain.reserve(nodes.size());
    prob.floor_w.reserve(nodes.size());
    prob.bandwidth_hz.reserve(nodes.size());
    for (const NodeState& n : nodes) {
        const double d = q.distance(n.position);
        if (!(d > 0.0)) throw std::domain_error("make_allocation_problem: FlyBS coincides with a node");
        const ChannelParams& ch = n.channel;
        prob.link_gain.push_back(ch.gain_coeff * std::pow(d, -ch.pathloss_exp) /
                                 (ch.noise_power_w + ch.interference_w));
        prob.floor_w.push_back(qos_floor(n, d));
        prob.bandwidth_hz.push_back(ch.bandwidth_hz);
    }
    return prob;
}

namespace detail {

inline std::vector<double> waterfill_at_level(const AllocationProblem& prob, double lambda) {
    constexpr double kLn2 = 0.6931471805599453;
    std::vector<double> p(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double unconstrained = prob.bandwidth_hz[i] / (lambda * kLn2) - 1.0 / prob.link_gain[i];
        p[i] = std::max(prob.floor_w[i], unconstrained);
    }
    return p;
}

}  // namespace detail

/// KKT water-filling with per-node floors: p_i = max(p_i^min, B_i/(lambda ln2) - 1/a_i)
/// with the dual level lambda found by bisection on the power-sum residual.
/// The objective is strictly increasing, so the cap binds whenever any node
/// sits above its floor.
inline std::vector<double> allocate(const AllocationProblem& prob) {
    constexpr double kLn2 = 0.6931471805599453;
    const std::size_t n = prob.size();
    if (n == 0) return {};
    if (prob.floor_w.size() != n || prob.bandwidth_hz.size() != n)
        throw std::invalid_argument("allocate: inconsistent problem vectors");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(prob.link_gain[i] > 0.0)) throw std::invalid_argument("allocate: link gains must be > 0");
        if (prob.floor_w[i] < 0.0) throw std::invalid_argument("allocate: negative floor");
    }

    const double floor_sum = std::accumulate(prob.floor_w.begin(), prob.floor_w.end(), 0.0);
    if (floor_sum > prob.p_max_total_w * (1.0 + 1e-12)) {
        throw PowerInfeasible("allocate: QoS floors exceed the total power budget",
                              floor_sum - prob.p_max_total_w);
    }

    // Marginal utility at the floor allocation; the largest one floors everybody.
    double lambda_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = prob.bandwidth_hz[i] * prob.link_gain[i] /
                         ((1.0 + prob.link_gain[i] * prob.floor_w[i]) * kLn2);
        lambda_hi = std::max(lambda_hi, g);
    }
    if (lambda_hi <= 0.0) return prob.floor_w;

    auto total_at = [&](double lambda) {
        const std::vector<double> p = detail::waterfill_at_level(prob, lambda);
        return std::accumulate(p.begin(), p.end(), 0.0);
    };

    double lambda_lo = lambda_hi;
    while (total_at(lambda_lo) < prob.p_max_total_w && lambda_lo > 1e-300) lambda_lo *= 0.5;
    if (total_at(lambda_lo) < prob.p_max_total_w) return detail::waterfill_at_level(prob, lambda_lo);

    const double tol = 1e-12 * std::max(prob.p_max_total_w, 1.0);
    for (int it = 0; it < 200 && lambda_hi - lambda_lo > 1e-16 * lambda_hi; ++it) {
        const double mid = 0.5 * (lambda_lo + lambda_hi);
        const double s = total_at(mid);
        if (std::abs(s - prob.p_max_total_w) <= tol) {
            lambda_lo = lambda_hi = mid;
            break;
        }
        if (s > prob.p_max_total_w)
            lambda_lo = mid;  // too much power handed out -> raise the level
        else
            lambda_hi = mid;
    }
    std::vector<double> p = detail::waterfill_at_level(prob, 0.5 * (lambda_lo + lambda_hi));

    // Split the residual over non-floored nodes so the cap binds exactly.
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    double residual = prob.p_max_total_w - sum;
    if (residual != 0.0) {
        std::size_t free_count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (p[i] > prob.floor_w[i]) ++free_count;
        if (free_count > 0) {
            const double share = residual / static_cast<double>(free_count);
            for (std::size_t i = 0; i < n; ++i)
                if (p[i] > prob.floor_w[i]) p[i] = std::max(prob.floor_w[i], p[i] + share);
        }
    }
    return p;
}

/// Objective value of an allocation under the problem's gains and bandwidths.
inline double allocation_objective(const AllocationProblem& prob, std::span<const double> p) {
    double total = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i)
        total += prob.bandwidth_hz[i] * std::log2(1.0 + prob.link_gain[i] * p[i]);
    return total;
}

}  // namespace flybs
