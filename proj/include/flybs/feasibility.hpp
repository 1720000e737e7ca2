#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"
#include "flybs/geometry.hpp"
#include "flybs/propulsion.hpp"

namespace flybs {

/// Quantities of the tangent lower bound on the required-power sum, anchored
/// at a fixed position. The bound is (sum iota_i) * ||q - theta0||^2 + chi and
/// never exceeds the exact sum of QoS power floors.
struct PowerBoundQuantities {
    std::vector<double> iota;       // per-node quadratic weights, W/m^2
    std::vector<long long> kappa;   // anchor grid indices, clamped at 0
    std::vector<double> mu;         // H_min^2 (1 + kappa_i sigma)
    double sigma = 0.05;
    Vec3 theta0;                    // iota-weighted node centroid
    double chi = 0.0;               // constant offset, W
    double iota_sum = 0.0;
    double upsilon = 0.0;           // sphere radius, valid iff upsilon_real
    bool upsilon_real = false;
    bool vacuous = false;           // no node carries a QoS floor
};

inline PowerBoundQuantities build_power_bound(const Vec3& q_anchor, std::span<const NodeState> nodes,
                                              double h_min, double sigma, double p_max_total_w) {
    PowerBoundQuantities lq;
    lq.sigma = sigma;
    const double h2 = h_min * h_min;
    const std::size_t n = nodes.size();
    lq.iota.resize(n);
    lq.kappa.resize(n);
    lq.mu.resize(n);

    Vec3 weighted_sum{};
    double sum_norm2 = 0.0;  // sum iota_i ||v_i||^2
    double chi_tail = 0.0;   // sum c_i mu_i^(a/2) (1 - a/2)
    for (std::size_t i = 0; i < n; ++i) {
        const NodeState& node = nodes[i];
        const ChannelParams& ch = node.channel;
        const double alpha = ch.pathloss_exp;
        const double snr_min = std::exp2(node.qos_min_bps / ch.bandwidth_hz) - 1.0;
        const double c_i = (ch.noise_power_w + ch.interference_w) * snr_min / ch.gain_coeff;

        const double dd = (q_anchor - node.position).norm2();
        const long long kappa = std::max(0LL, static_cast<long long>(std::floor((dd - h2) / (h2 * sigma))));
        const double mu = h2 * (1.0 + static_cast<double>(kappa) * sigma);
        const double iota = 0.5 * c_i * alpha * std::pow(mu, 0.5 * alpha - 1.0);

        lq.kappa[i] = kappa;
        lq.mu[i] = mu;
        lq.iota[i] = iota;
        lq.iota_sum += iota;
        weighted_sum += node.position * iota;
        sum_norm2 += iota * node.position.norm2();
        chi_tail += c_i * std::pow(mu, 0.5 * alpha) * (1.0 - 0.5 * alpha);
    }

    if (lq.iota_sum <= 0.0) {
        lq.vacuous = true;
        lq.theta0 = q_anchor;
        lq.chi = 0.0;
        lq.upsilon_real = true;
        lq.upsilon = std::numeric_limits<double>::infinity();
        return lq;
    }

    lq.theta0 = weighted_sum / lq.iota_sum;
    lq.chi = sum_norm2 - weighted_sum.norm2() / lq.iota_sum + chi_tail;
    const double ups2 = (p_max_total_w - lq.chi) / lq.iota_sum;
    lq.upsilon_real = ups2 >= 0.0;
    lq.upsilon = lq.upsilon_real ? std::sqrt(ups2) : 0.0;
    return lq;
}

/// Tangent lower bound on the sum of QoS power floors at q.
inline double power_lower_bound(const Vec3& q, const PowerBoundQuantities& lq) {
    if (lq.vacuous) return 0.0;
    return lq.iota_sum * (q - lq.theta0).norm2() + lq.chi;
}

/// Static limits defining the per-timestep constraint region.
struct RegionLimits {
    double h_min = 100.0;
    double h_max = 300.0;
    double v_max = 25.0;        // V_F^max, m/s
    double p_pr_th = 250.0;     // propulsion power cap, W
    double delta_s = 1.0;       // timestep length
    double p_max_total = 1.0;   // transmission power budget, W
    PropulsionParams propulsion;
    double sigma = 0.05;

    void validate() const {
        if (!(h_min > 0.0) || !(h_max >= h_min)) throw ConfigError("limits: need 0 < h_min <= h_max");
        if (!(v_max >= 0.0)) throw ConfigError("limits: v_max must be >= 0");
        if (!(p_pr_th > 0.0)) throw ConfigError("limits: p_pr_th must be > 0");
        if (!(delta_s > 0.0)) throw ConfigError("limits: delta_s must be > 0");
        if (!(p_max_total > 0.0)) throw ConfigError("limits: p_max_total must be > 0");
        if (!(sigma > 0.0)) throw ConfigError("limits: sigma must be > 0");
        propulsion.validate();
    }
};

/// The N+2 constraint spheres, altitude slab and inner speed bound that make
/// up the feasibility region for the next FlyBS position.
struct ConstraintRegion {
    std::vector<Sphere> qos_spheres;      // finite-radius QoS balls
    std::vector<int> qos_node_index;      // node index per QoS sphere
    Sphere speed_outer;                   // centered at q_prev
    double speed_inner_radius = 0.0;      // lower displacement bound, m
    Sphere power_bound_sphere;
    bool power_bound_active = false;
    double h_min = 0.0, h_max = 0.0;
    Vec3 q_prev;
    PowerBoundQuantities power_bound;
    bool hard_infeasible = false;
    std::string hard_infeasible_reason;

    /// Membership with an absolute slack in meters.
    bool contains(const Vec3& p, double tol = 1e-6) const {
        if (hard_infeasible) return false;
        if (p.z < h_min - tol || p.z > h_max + tol) return false;
        const double d_prev = p.distance(q_prev);
        if (d_prev > speed_outer.radius + tol) return false;
        if (d_prev < speed_inner_radius - tol) return false;
        if (power_bound_active && !power_bound_sphere.contains(p, tol)) return false;
        for (const Sphere& s : qos_spheres)
            if (!s.contains(p, tol)) return false;
        return true;
    }
};

/// Assemble the constraint region at the previous position for the current
/// power vector. QoS spheres with vacuous floors are omitted.
inline ConstraintRegion build_region(const Vec3& q_prev, std::span<const NodeState> nodes,
                                     std::span<const double> p, const RegionLimits& limits) {
    if (p.size() != nodes.size()) throw std::invalid_argument("build_region: power vector size mismatch");
    ConstraintRegion region;
    region.h_min = limits.h_min;
    region.h_max = limits.h_max;
    region.q_prev = q_prev;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].qos_min_bps > 0.0 && !(p[i] > 0.0))
            throw std::invalid_argument("build_region: zero power on a node with a QoS floor");
        const double rho = qos_radius(nodes[i], p[i]);
        if (std::isinf(rho)) continue;
        region.qos_spheres.push_back(Sphere{nodes[i].position, rho});
        region.qos_node_index.push_back(static_cast<int>(i));
    }

    try {
        const SpeedInterval si = speed_interval(limits.p_pr_th, limits.v_max, limits.propulsion);
        region.speed_outer = Sphere{q_prev, si.v_hi * limits.delta_s};
        region.speed_inner_radius = si.v_lo * limits.delta_s;
    } catch (const SpeedInfeasible& e) {
        region.hard_infeasible = true;
        region.hard_infeasible_reason = e.what();
        return region;
    }

    region.power_bound = build_power_bound(q_prev, nodes, limits.h_min, limits.sigma, limits.p_max_total);
    if (!region.power_bound.upsilon_real) {
        region.hard_infeasible = true;
        region.hard_infeasible_reason = "power-bound sphere empty: budget below the required-power lower bound";
        return region;
    }
    if (!region.power_bound.vacuous) {
        region.power_bound_sphere = Sphere{region.power_bound.theta0, region.power_bound.upsilon};
        region.power_bound_active = true;
    }
    return region;
}

struct FeasibilityResult {
    bool feasible = false;
    Vec3 witness;
    std::string reason;
};

namespace detail {

struct SweepSphere {
    Sphere s;
    std::string label;
};

/// Admissibility of a single candidate point against every alive sphere,
/// the altitude slab and the inner speed bound.
inline bool admissible_point(const Vec3& p, const std::vector<SweepSphere>& spheres,
                             const std::vector<char>& alive, const ConstraintRegion& region, double tol) {
    if (p.z < region.h_min - tol || p.z > region.h_max + tol) return false;
    if (region.speed_inner_radius > 0.0 && p.distance(region.q_prev) < region.speed_inner_radius - tol)
        return false;
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        if (!alive[i]) continue;
        const Vec3 d = p - spheres[i].s.center;
        const double r = spheres[i].s.radius + tol;
        if (d.norm2() > r * r) return false;
    }
    return true;
}

/// Full 2D sweep on the horizontal plane z = z0: candidate points are the
/// circle centers and all pairwise circle intersections.
inline std::optional<Vec3> sweep_plane(double z0, const std::vector<SweepSphere>& spheres,
                                       const std::vector<char>& alive, const ConstraintRegion& region,
                                       double tol) {
    std::vector<Circle3D> circles;
    circles.reserve(spheres.size());
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        if (!alive[i]) continue;
        auto c = sphere_plane_intersection(spheres[i].s, z0);
        if (!c) return std::nullopt;  // some ball misses the plane entirely
        circles.push_back(*c);
    }
    for (const Circle3D& c : circles) {
        if (admissible_point(c.center, spheres, alive, region, tol)) return c.center;
    }
    for (std::size_t i = 0; i < circles.size(); ++i) {
        for (std::size_t j = i + 1; j < circles.size(); ++j) {
            for (const Vec3& p : circle_circle_points(circles[i], circles[j])) {
                if (admissible_point(p, spheres, alive, region, tol)) return p;
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Decide emptiness of the constraint region with the sphere-pair sweep:
/// prune nested spheres, bail out on disjoint pairs, then search candidate
/// points on tangent planes, the altitude planes, pairwise intersection
/// circles and sphere-triple vertices. Returns a witness when nonempty.
inline FeasibilityResult is_feasible(const ConstraintRegion& region) {
    constexpr double kTol = 1e-6;
    if (region.hard_infeasible) return {false, {}, region.hard_infeasible_reason};

    using detail::SweepSphere;
    std::vector<SweepSphere> spheres;
    spheres.push_back({region.speed_outer, "speed"});
    for (std::size_t i = 0; i < region.qos_spheres.size(); ++i)
        spheres.push_back({region.qos_spheres[i], "qos[" + std::to_string(region.qos_node_index[i]) + "]"});
    if (region.power_bound_active) spheres.push_back({region.power_bound_sphere, "power-bound"});

    std::vector<char> alive(spheres.size(), 1);

    // Deduplicate identical spheres.
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        if (!alive[i]) continue;
        for (std::size_t j = i + 1; j < spheres.size(); ++j) {
            if (!alive[j]) continue;
            if (spheres[i].s.center.distance(spheres[j].s.center) <= kGeomTol &&
                std::abs(spheres[i].s.radius - spheres[j].s.radius) <= kGeomTol)
                alive[j] = 0;
        }
    }

    // Cheap pre-prune: any ball that swallows the speed ball is implied by it.
    for (std::size_t j = 1; j < spheres.size(); ++j) {
        if (!alive[j]) continue;
        if (spheres[j].s.center.distance(region.speed_outer.center) + region.speed_outer.radius <=
            spheres[j].s.radius - kGeomTol)
            alive[j] = 0;
    }

    // Pairwise classification to a fixed point: disjoint pairs certify
    // emptiness, nested pairs drop the outer sphere.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < spheres.size(); ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < spheres.size(); ++j) {
                if (!alive[j]) continue;
                const auto rel = sphere_sphere_relation(spheres[i].s, spheres[j].s);
                if (rel.relation == SphereRelation::Disjoint) {
                    return {false, {},
                            "constraint spheres " + spheres[i].label + " and " + spheres[j].label +
                                " are disjoint"};
                }
                if (rel.relation == SphereRelation::AInsideB) {
                    alive[j] = 0;
                    changed = true;
                } else if (rel.relation == SphereRelation::BInsideA) {
                    alive[i] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }

    auto check = [&](const Vec3& p) { return detail::admissible_point(p, spheres, alive, region, kTol); };

    // Sphere tangent points (on its own tangent plane a sphere is a single
    // point, so the tangent-plane candidates collapse to these).
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        if (!alive[i]) continue;
        const Sphere& s = spheres[i].s;
        const Vec3 top = s.center + Vec3{0.0, 0.0, s.radius};
        const Vec3 bottom = s.center - Vec3{0.0, 0.0, s.radius};
        if (check(top)) return {true, top, ""};
        if (check(bottom)) return {true, bottom, ""};
    }

    // Altitude planes.
    for (double z0 : {region.h_min, region.h_max}) {
        if (auto w = detail::sweep_plane(z0, spheres, alive, region, kTol)) return {true, *w, ""};
    }

    // Pairwise intersection circles: their z-extremes, or a full plane sweep
    // when the circle is horizontal.
    std::vector<std::pair<std::size_t, Circle3D>> circles;  // owner sphere i of pair (i,j)
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        if (!alive[i]) continue;
        for (std::size_t j = i + 1; j < spheres.size(); ++j) {
            if (!alive[j]) continue;
            const auto rel = sphere_sphere_relation(spheres[i].s, spheres[j].s);
            if (rel.relation != SphereRelation::Intersect) continue;
            const Circle3D& c = *rel.circle;
            if (std::abs(c.unit_normal.z) > 1.0 - 1e-12) {
                if (c.center.z >= region.h_min - kTol && c.center.z <= region.h_max + kTol) {
                    if (auto w = detail::sweep_plane(c.center.z, spheres, alive, region, kTol))
                        return {true, *w, ""};
                }
            } else {
                const auto [ctop, cbot] = circle_z_extremes(c);
                if (check(ctop)) return {true, ctop, ""};
                if (check(cbot)) return {true, cbot, ""};
            }
            circles.emplace_back(i, c);
        }
    }

    // Sphere-triple vertices.
    for (const auto& [owner, c] : circles) {
        for (std::size_t k = 0; k < spheres.size(); ++k) {
            if (!alive[k] || k == owner) continue;
            for (const Vec3& p : circle_sphere_points(c, spheres[k].s)) {
                if (check(p)) return {true, p, ""};
            }
        }
    }

    return {false, {}, "no common point of the constraint spheres within the altitude slab"};
}

}  // namespace flybs
