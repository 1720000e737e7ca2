#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"
#include "flybs/feasibility.hpp"
#include "flybs/optimizer.hpp"
#include "flybs/propulsion.hpp"

namespace flybs {

enum class Scheme { Proposed, MMC, EEM, EEEM };

inline std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Proposed: return "proposed";
        case Scheme::MMC: return "mmc";
        case Scheme::EEM: return "eem";
        case Scheme::EEEM: return "eeem";
    }
    return "proposed";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "proposed") return Scheme::Proposed;
    if (s == "mmc") return Scheme::MMC;
    if (s == "eem") return Scheme::EEM;
    if (s == "eeem") return Scheme::EEEM;
    throw ConfigError("unknown scheme '" + s + "' (expected proposed|mmc|eem|eeem)");
}

/// Full simulation scenario; defaults follow the evaluation setup.
struct ScenarioConfig {
    double arena_x_m = 600.0;
    double arena_y_m = 600.0;
    int n_nodes = 100;
    double total_bandwidth_hz = 100e6;
    std::vector<double> bandwidth_override_hz;  // optional, one entry per node
    double noise_density_dbm_hz = -174.0;
    double interference_dbm = -100.0;
    double pathloss_exp = 2.4;
    double gain_coeff = 1.0;
    double rician_factor = 10.0;
    double h_min_m = 100.0;
    double h_max_m = 300.0;
    double p_max_total_w = 1.0;
    double v_max_ms = 25.0;
    double p_pr_th_w = 250.0;
    PropulsionParams propulsion;
    double qos_min_bps = 1e6;
    double duration_s = 1200.0;
    double delta_s = 1.0;
    int n_drops = 1;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::Proposed;
    double sigma = 0.05;
    double xi = 0.05;
    double epsilon_m = 0.1;
    int max_iters = 10;
    double node_z_m = 0.0;
    bool mmc_speed_constrained = true;

    void validate() const {
        if (!(arena_x_m > 0.0) || !(arena_y_m > 0.0)) throw ConfigError("config: arena must be positive");
        if (n_nodes < 1) throw ConfigError("config: n_nodes must be >= 1");
        if (!(total_bandwidth_hz > 0.0)) throw ConfigError("config: total_bandwidth_hz must be > 0");
        if (!bandwidth_override_hz.empty() &&
            bandwidth_override_hz.size() != static_cast<std::size_t>(n_nodes))
            throw ConfigError("config: bandwidth_override_hz must have n_nodes entries");
        for (double b : bandwidth_override_hz)
            if (!(b > 0.0)) throw ConfigError("config: bandwidth overrides must be > 0");
        if (!(pathloss_exp >= 2.0)) throw ConfigError("config: pathloss_exp must be >= 2");
        if (!(gain_coeff > 0.0)) throw ConfigError("config: gain_coeff must be > 0");
        if (qos_min_bps < 0.0) throw ConfigError("config: qos_min_bps must be >= 0");
        if (!(duration_s >= 0.0)) throw ConfigError("config: duration_s must be >= 0");
        if (!(delta_s > 0.0)) throw ConfigError("config: delta_s must be > 0");
        if (n_drops < 1) throw ConfigError("config: n_drops must be >= 1");
        region_limits().validate();
        optimizer_config().validate();
    }

    RegionLimits region_limits() const {
        RegionLimits lim;
        lim.h_min = h_min_m;
        lim.h_max = h_max_m;
        lim.v_max = v_max_ms;
        lim.p_pr_th = p_pr_th_w;
        lim.delta_s = delta_s;
        lim.p_max_total = p_max_total_w;
        lim.propulsion = propulsion;
        lim.sigma = sigma;
        return lim;
    }

    OptimizerConfig optimizer_config() const {
        OptimizerConfig cfg;
        cfg.epsilon_m = epsilon_m;
        cfg.max_iters = max_iters;
        cfg.sigma = sigma;
        cfg.xi = xi;
        return cfg;
    }

    /// Instantiate the node set (positions are filled in by mobility init).
    std::vector<NodeState> make_nodes() const {
        std::vector<NodeState> nodes(static_cast<std::size_t>(n_nodes));
        const double density_w_hz = dbm_to_watt(noise_density_dbm_hz);
        const double interference_w = dbm_to_watt(interference_dbm);
        for (int i = 0; i < n_nodes; ++i) {
            NodeState& n = nodes[static_cast<std::size_t>(i)];
            n.id = i;
            n.qos_min_bps = qos_min_bps;
            ChannelParams ch;
            ch.gain_coeff = gain_coeff;
            ch.pathloss_exp = pathloss_exp;
            ch.bandwidth_hz = bandwidth_override_hz.empty()
                                  ? total_bandwidth_hz / static_cast<double>(n_nodes)
                                  : bandwidth_override_hz[static_cast<std::size_t>(i)];
            ch.noise_power_w = density_w_hz * ch.bandwidth_hz;
            ch.interference_w = interference_w;
            ch.rician_factor = rician_factor;
            n.channel = ch;
        }
        return nodes;
    }
};

inline void to_json(nlohmann::json& j, const PropulsionParams& pp) {
    j = nlohmann::json{{"blade_profile_power_w", pp.blade_profile_power_w},
                       {"induced_power_w", pp.induced_power_w},
                       {"tip_speed_ms", pp.tip_speed_ms},
                       {"hover_induced_velocity_ms", pp.hover_induced_velocity_ms},
                       {"fuselage_drag_ratio", pp.fuselage_drag_ratio},
                       {"air_density", pp.air_density},
                       {"rotor_solidity", pp.rotor_solidity},
                       {"rotor_disc_area_m2", pp.rotor_disc_area_m2}};
}

inline void from_json(const nlohmann::json& j, PropulsionParams& pp) {
    pp.blade_profile_power_w = j.value("blade_profile_power_w", pp.blade_profile_power_w);
    pp.induced_power_w = j.value("induced_power_w", pp.induced_power_w);
    pp.tip_speed_ms = j.value("tip_speed_ms", pp.tip_speed_ms);
    pp.hover_induced_velocity_ms = j.value("hover_induced_velocity_ms", pp.hover_induced_velocity_ms);
    pp.fuselage_drag_ratio = j.value("fuselage_drag_ratio", pp.fuselage_drag_ratio);
    pp.air_density = j.value("air_density", pp.air_density);
    pp.rotor_solidity = j.value("rotor_solidity", pp.rotor_solidity);
    pp.rotor_disc_area_m2 = j.value("rotor_disc_area_m2", pp.rotor_disc_area_m2);
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
    j = nlohmann::json{{"arena_x_m", c.arena_x_m},
                       {"arena_y_m", c.arena_y_m},
                       {"n_nodes", c.n_nodes},
                       {"total_bandwidth_hz", c.total_bandwidth_hz},
                       {"noise_density_dbm_hz", c.noise_density_dbm_hz},
                       {"interference_dbm", c.interference_dbm},
                       {"pathloss_exp", c.pathloss_exp},
                       {"gain_coeff", c.gain_coeff},
                       {"rician_factor", c.rician_factor},
                       {"h_min_m", c.h_min_m},
                       {"h_max_m", c.h_max_m},
                       {"p_max_total_w", c.p_max_total_w},
                       {"v_max_ms", c.v_max_ms},
                       {"p_pr_th_w", c.p_pr_th_w},
                       {"propulsion", c.propulsion},
                       {"qos_min_bps", c.qos_min_bps},
                       {"duration_s", c.duration_s},
                       {"delta_s", c.delta_s},
                       {"n_drops", c.n_drops},
                       {"seed", c.seed},
                       {"scheme", to_string(c.scheme)},
                       {"sigma", c.sigma},
                       {"xi", c.xi},
                       {"epsilon_m", c.epsilon_m},
                       {"max_iters", c.max_iters},
                       {"node_z_m", c.node_z_m},
                       {"mmc_speed_constrained", c.mmc_speed_constrained}};
    if (!c.bandwidth_override_hz.empty()) j["bandwidth_override_hz"] = c.bandwidth_override_hz;
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
    c.arena_x_m = j.value("arena_x_m", c.arena_x_m);
    c.arena_y_m = j.value("arena_y_m", c.arena_y_m);
    c.n_nodes = j.value("n_nodes", c.n_nodes);
    c.total_bandwidth_hz = j.value("total_bandwidth_hz", c.total_bandwidth_hz);
    if (j.contains("bandwidth_override_hz"))
        c.bandwidth_override_hz = j.at("bandwidth_override_hz").get<std::vector<double>>();
    c.noise_density_dbm_hz = j.value("noise_density_dbm_hz", c.noise_density_dbm_hz);
    c.interference_dbm = j.value("interference_dbm", c.interference_dbm);
    c.pathloss_exp = j.value("pathloss_exp", c.pathloss_exp);
    c.gain_coeff = j.value("gain_coeff", c.gain_coeff);
    c.rician_factor = j.value("rician_factor", c.rician_factor);
    c.h_min_m = j.value("h_min_m", c.h_min_m);
    c.h_max_m = j.value("h_max_m", c.h_max_m);
    c.p_max_total_w = j.value("p_max_total_w", c.p_max_total_w);
    c.v_max_ms = j.value("v_max_ms", c.v_max_ms);
    c.p_pr_th_w = j.value("p_pr_th_w", c.p_pr_th_w);
    if (j.contains("propulsion")) c.propulsion = j.at("propulsion").get<PropulsionParams>();
    c.qos_min_bps = j.value("qos_min_bps", c.qos_min_bps);
    c.duration_s = j.value("duration_s", c.duration_s);
    c.delta_s = j.value("delta_s", c.delta_s);
    c.n_drops = j.value("n_drops", c.n_drops);
    c.seed = j.value("seed", c.seed);
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    c.sigma = j.value("sigma", c.sigma);
    c.xi = j.value("xi", c.xi);
    c.epsilon_m = j.value("epsilon_m", c.epsilon_m);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.node_z_m = j.value("node_z_m", c.node_z_m);
    c.mmc_speed_constrained = j.value("mmc_speed_constrained", c.mmc_speed_constrained);
}

}  // namespace flybs
