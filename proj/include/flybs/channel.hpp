#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "flybs/core.hpp"

namespace flybs {

/// Link-budget parameters of one downlink channel. The deterministic mean
/// channel (fading factor 1) is used everywhere in the optimization path;
/// rician_factor only feeds the optional evaluation-mode fading sampler.
struct ChannelParams {
    double gain_coeff = 1.0;       // Q_i, aggregates antenna gains and frequency
    double pathloss_exp = 2.4;     // alpha_i, >= 2
    double bandwidth_hz = 1e6;     // B_i
    double noise_power_w = 1e-13;  // N_i
    double interference_w = 0.0;   // I
    double rician_factor = 10.0;   // gamma, >= 0

    void validate() const {
        if (!(gain_coeff > 0.0)) throw ConfigError("channel: gain_coeff must be > 0");
        if (!(pathloss_exp >= 2.0)) throw ConfigError("channel: pathloss_exp must be >= 2");
        if (!(bandwidth_hz > 0.0)) throw ConfigError("channel: bandwidth_hz must be > 0");
        if (!(noise_power_w > 0.0)) throw ConfigError("channel: noise_power_w must be > 0");
        if (interference_w < 0.0) throw ConfigError("channel: interference_w must be >= 0");
        if (rician_factor < 0.0) throw ConfigError("channel: rician_factor must be >= 0");
    }
};

struct NodeState {
    int id = 0;
    Vec3 position;
    double qos_min_bps = 0.0;  // C_i^min
    ChannelParams channel;
};

/// Mean received power Q_i * p_tx * d^-alpha.
inline double received_power(double p_tx_w, double distance_m, const ChannelParams& ch) {
    if (p_tx_w < 0.0) throw std::domain_error("received_power: negative transmit power");
    if (!(distance_m > 0.0)) throw std::domain_error("received_power: singular pathloss at distance <= 0");
    return ch.gain_coeff * p_tx_w * std::pow(distance_m, -ch.pathloss_exp);
}

/// Shannon capacity B_i * log2(1 + p_rx / (N_i + I)), in bit/s.
inline double capacity(double p_rx_w, const ChannelParams& ch) {
    if (p_rx_w < 0.0) throw std::domain_error("capacity: negative received power");
    return ch.bandwidth_hz * std::log2(1.0 + p_rx_w / (ch.noise_power_w + ch.interference_w));
}

/// Capacity of node i when served with transmit power p_i from position q.
inline double node_capacity(const Vec3& q, const NodeState& node, double p_i_w) {
    return capacity(received_power(p_i_w, q.distance(node.position), node.channel), node.channel);
}

/// Exact sum capacity over all nodes; the objective used for safeguard checks.
inline double sum_capacity(const Vec3& q, std::span<const NodeState> nodes, std::span<const double> p) {
    if (p.size() != nodes.size()) throw std::invalid_argument("sum_capacity: power vector size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (p[i] < 0.0) throw std::domain_error("sum_capacity: negative power entry");
        total += node_capacity(q, nodes[i], p[i]);
    }
    return total;
}

/// Radius of the QoS sphere: the distance at which capacity with power p_i
/// equals exactly C_i^min. +infinity when the QoS floor is vacuous.
inline double qos_radius(const NodeState& node, double p_i_w) {
    const ChannelParams& ch = node.channel;
    if (node.qos_min_bps <= 0.0) return std::numeric_limits<double>::infinity();
    if (p_i_w <= 0.0) return 0.0;  // unreachable requirement, degenerate sphere
    const double snr_min = std::exp2(node.qos_min_bps / ch.bandwidth_hz) - 1.0;
    const double base = ch.gain_coeff * p_i_w / (snr_min * (ch.noise_power_w + ch.interference_w));
    return std::pow(base, 1.0 / ch.pathloss_exp);
}

/// Evaluation-mode Rician power gain with unit mean LoS component.
/// Never used inside positioning or allocation.
inline double rician_fading_gain(double rician_factor, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const double k = rician_factor;
    const double los = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    const double re = los + sigma * n01(rng);
    const double im = sigma * n01(rng);
    return re * re + im * im;
}

}  // namespace flybs
