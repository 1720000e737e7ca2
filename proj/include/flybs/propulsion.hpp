#pragma once

#include <algorithm>
#include <string>

#include "flybs/core.hpp"

namespace flybs {

/// Rotary-wing propulsion model parameters (Zeng 2019 reference set).
struct PropulsionParams {
    double blade_profile_power_w = 79.86;     // L_0
    double induced_power_w = 88.63;           // L_i
    double tip_speed_ms = 120.0;              // U_tip
    double hover_induced_velocity_ms = 4.03;  // v_{0,h}
    double fuselage_drag_ratio = 0.6;         // eta_0
    double air_density = 1.225;               // rho, kg/m^3
    double rotor_solidity = 0.05;             // s_r
    double rotor_disc_area_m2 = 0.503;        // A

    void validate() const {
        const double vals[] = {blade_profile_power_w, induced_power_w,        tip_speed_ms,
                               hover_induced_velocity_ms, fuselage_drag_ratio, air_density,
                               rotor_solidity,        rotor_disc_area_m2};
        for (double v : vals)
            if (!(v > 0.0)) throw ConfigError("propulsion: all parameters must be > 0");
    }
};

/// Speed band [v_lo, v_hi] on which the propulsion power stays under the cap.
struct SpeedInterval {
    double v_lo = 0.0;
    double v_hi = 0.0;
};

/// Propulsion power draw at level flight speed v.
inline double propulsion_power(double v_ms, const PropulsionParams& pp) {
    if (v_ms < 0.0) throw std::domain_error("propulsion_power: negative speed");
    const double v2 = v_ms * v_ms;
    const double blade = pp.blade_profile_power_w * (1.0 + 3.0 * v2 / (pp.tip_speed_ms * pp.tip_speed_ms));
    const double parasite =
        0.5 * pp.fuselage_drag_ratio * pp.air_density * pp.rotor_solidity * pp.rotor_disc_area_m2 * v2 * v_ms;
    const double v0sq = pp.hover_induced_velocity_ms * pp.hover_induced_velocity_ms;
    const double radicand = std::sqrt(1.0 + v2 * v2 / (4.0 * v0sq * v0sq)) - v2 / (2.0 * v0sq);
    const double induced = pp.induced_power_w * std::sqrt(std::max(radicand, 0.0));
    return blade + parasite + induced;
}

namespace detail {

// One-sided bisection for the crossing of propulsion_power(v) == cap on a
// monotone segment [lo, hi]; returns the admissible-side endpoint.
inline double bisect_crossing(double lo, double hi, double cap, const PropulsionParams& pp, bool rising) {
    for (int it = 0; it < 200 && hi - lo > 1e-4; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool ok = propulsion_power(mid, pp) <= cap;
        if (ok == rising)
            lo = mid;
        else
            hi = mid;
    }
    return rising ? lo : hi;
}

}  // namespace detail

/// Largest contiguous speed interval within [0, v_max] on which propulsion
/// power stays at or below p_cap. The curve is U-shaped: a coarse bracket of
/// the minimum plus bisection on each monotone flank.
inline SpeedInterval speed_interval(double p_cap_w, double v_max_ms, const PropulsionParams& pp) {
    if (!(p_cap_w > 0.0)) throw std::domain_error("speed_interval: cap must be > 0");
    if (!(v_max_ms >= 0.0)) throw std::domain_error("speed_interval: v_max must be >= 0");

    // Bracket the curve minimum over [0, v_max] with a coarse scan.
    constexpr int kScan = 512;
    double v_star = 0.0;
    double p_star = propulsion_power(0.0, pp);
    for (int i = 1; i <= kScan; ++i) {
        const double v = v_max_ms * static_cast<double>(i) / kScan;
        const double p = propulsion_power(v, pp);
        if (p < p_star) {
            p_star = p;
            v_star = v;
        }
    }
    // Golden-section refinement around the coarse minimum.
    {
        double a = std::max(0.0, v_star - v_max_ms / kScan);
        double b = std::min(v_max_ms, v_star + v_max_ms / kScan);
        constexpr double kInvPhi = 0.6180339887498949;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        for (int it = 0; it < 80 && b - a > 1e-6; ++it) {
            if (propulsion_power(c, pp) < propulsion_power(d, pp)) {
                b = d;
                d = c;
                c = b - kInvPhi * (b - a);
            } else {
                a = c;
                c = d;
                d = a + kInvPhi * (b - a);
            }
        }
        v_star = 0.5 * (a + b);
        p_star = std::min(p_star, propulsion_power(v_star, pp));
    }

    if (p_star > p_cap_w) {
        throw SpeedInfeasible("speed_interval: propulsion cap " + std::to_string(p_cap_w) +
                              " W is below the minimum achievable " + std::to_string(p_star) + " W");
    }

    SpeedInterval out;
    out.v_lo = propulsion_power(0.0, pp) <= p_cap_w ? 0.0 : detail::bisect_crossing(0.0, v_star, p_cap_w, pp, false);
    out.v_hi = propulsion_power(v_max_ms, pp) <= p_cap_w
                   ? v_max_ms
                   : detail::bisect_crossing(v_star, v_max_ms, p_cap_w, pp, true);
    return out;
}

}  // namespace flybs
