#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"
#include "flybs/feasibility.hpp"
#include "flybs/geometry.hpp"

namespace flybs {

/// Local quadratic surrogate of the sum capacity around an anchor position:
/// C_tot(q) ~ W - zeta * ||q - S0||^2, maximized at the power-weighted
/// centroid S0.
struct RadialApprox {
    Vec3 s0;
    double zeta = 0.0;            // bit/s per m^2
    double w = 0.0;               // bit/s
    std::vector<double> phi;      // per-node quadratic weights
    std::vector<long long> s_approx;
    double sigma = 0.05;
    double xi = 0.05;
    Vec3 anchor;
    bool degenerate = false;      // all powers zero: no preferred direction

    double value(const Vec3& q) const { return w - zeta * (q - s0).norm2(); }
};

/// Build the radial surrogate at q_anchor for the current power vector.
inline RadialApprox build_radial_approx(const Vec3& q_anchor, std::span<const NodeState> nodes,
                                        std::span<const double> p, double sigma, double xi, double h_min) {
    if (p.size() != nodes.size())
        throw std::invalid_argument("build_radial_approx: power vector size mismatch");
    constexpr double kLn2 = 0.6931471805599453;
    RadialApprox approx;
    approx.sigma = sigma;
    approx.xi = xi;
    approx.anchor = q_anchor;
    const std::size_t n = nodes.size();
    approx.phi.resize(n, 0.0);
    approx.s_approx.resize(n, 0);

    const double h2 = h_min * h_min;
    Vec3 weighted_sum{};
    double sum_norm2 = 0.0;   // sum phi_i ||v_i||^2
    double w_tail = 0.0;      // anchor terms and log-linearization constants
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p[i] >= 0.0)) throw std::invalid_argument("build_radial_approx: negative power");
        if (p[i] == 0.0) continue;
        const NodeState& node = nodes[i];
        const ChannelParams& ch = node.channel;
        const double alpha = ch.pathloss_exp;
        const double dd = (q_anchor - node.position).norm2();
        if (!(dd > 0.0)) throw std::domain_error("build_radial_approx: anchor coincides with a node");

        const long long kappa = std::max(0LL, static_cast<long long>(std::floor((dd - h2) / (h2 * sigma))));
        const double mu = h2 * (1.0 + static_cast<double>(kappa) * sigma);

        const double noise = ch.noise_power_w + ch.interference_w;
        const double snr = ch.gain_coeff * p[i] * std::pow(dd, -0.5 * alpha) / noise;
        const long long s_i = static_cast<long long>(std::floor(snr / sigma));
        const double one_plus = 1.0 + static_cast<double>(s_i) * xi;

        const double g_i = ch.bandwidth_hz * ch.gain_coeff * p[i] / (one_plus * noise * kLn2);
        const double phi = g_i * 0.5 * alpha * std::pow(mu, -0.5 * alpha - 1.0);
        const double psi = ch.bandwidth_hz / kLn2 *
                           (std::log(one_plus) - static_cast<double>(s_i) * xi / one_plus);

        approx.s_approx[i] = s_i;
        approx.phi[i] = phi;
        approx.zeta += phi;
        weighted_sum += node.position * phi;
        sum_norm2 += phi * node.position.norm2();
        w_tail += g_i * std::pow(mu, -0.5 * alpha) + phi * mu + psi;
    }

    if (approx.zeta <= 0.0) {
        approx.degenerate = true;
        approx.s0 = q_anchor;
        approx.w = 0.0;
        return approx;
    }
    approx.s0 = weighted_sum / approx.zeta;
    approx.w = weighted_sum.norm2() / approx.zeta - sum_norm2 + w_tail;
    return approx;
}

struct PositionUpdateResult {
    Vec3 position;
    bool used_fallback = false;  // candidate set emptied out; witness returned
};

namespace detail {

/// Closest point of the disk (ball cut by a horizontal plane) to x, interior
/// included.
inline std::optional<Vec3> closest_point_on_disk(const Sphere& s, double z0, const Vec3& x) {
    const auto circ = sphere_plane_intersection(s, z0);
    if (!circ) return std::nullopt;
    const Vec3 proj{x.x, x.y, z0};
    const Vec3 d = proj - circ->center;
    const double n = d.norm();
    if (n <= circ->radius) return proj;
    if (n <= kGeomTol) return circ->center + Vec3{circ->radius, 0.0, 0.0};
    return circ->center + d * (circ->radius / n);
}

inline bool candidate_less(const Vec3& a, double da, const Vec3& b, double db) {
    if (da != db) return da < db;
    if (a.z != b.z) return a.z < b.z;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

}  // namespace detail

/// One positioning move: jump to S0 when it is feasible, otherwise to the
/// closest admissible point assembled from sphere projections, intersection
/// circles, altitude disks and their mutual vertices.
inline PositionUpdateResult position_update(const RadialApprox& approx, const ConstraintRegion& region,
                                            std::optional<Vec3> fallback_witness = std::nullopt) {
    constexpr double kTol = 1e-6;
    if (approx.degenerate) return {approx.anchor, false};
    const Vec3 s0 = approx.s0;
    if (region.contains(s0, kTol)) return {s0, false};

    std::vector<Sphere> balls;
    balls.push_back(region.speed_outer);
    for (const Sphere& s : region.qos_spheres) balls.push_back(s);
    if (region.power_bound_active) balls.push_back(region.power_bound_sphere);

    // Strictly nested outer balls cannot host the boundary closest point;
    // drop them so the candidate set stays small.
    {
        std::vector<char> alive(balls.size(), 1);
        for (std::size_t j = 1; j < balls.size(); ++j) {
            if (balls[j].center.distance(region.speed_outer.center) + region.speed_outer.radius <=
                balls[j].radius - kGeomTol)
                alive[j] = 0;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < balls.size(); ++i) {
                if (!alive[i]) continue;
                for (std::size_t j = i + 1; j < balls.size(); ++j) {
                    if (!alive[j]) continue;
                    const double d = balls[i].center.distance(balls[j].center);
                    if (d + balls[i].radius <= balls[j].radius - kGeomTol) {
                        alive[j] = 0;
                        changed = true;
                    } else if (d + balls[j].radius <= balls[i].radius - kGeomTol) {
                        alive[i] = 0;
                        changed = true;
                        break;
                    }
                }
            }
        }
        std::vector<Sphere> kept;
        kept.reserve(balls.size());
        for (std::size_t i = 0; i < balls.size(); ++i)
            if (alive[i]) kept.push_back(balls[i]);
        balls = std::move(kept);
    }

    std::vector<Vec3> candidates;
    candidates.reserve(balls.size() * balls.size());

    // Projections onto each ball.
    for (const Sphere& b : balls) {
        candidates.push_back(b.contains(s0) ? s0 : closest_point_on_sphere(b, s0));
    }

    // Pairwise intersection circles and their closest points.
    std::vector<Circle3D> circles;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            const auto rel = sphere_sphere_relation(balls[i], balls[j]);
            if (rel.relation != SphereRelation::Intersect) continue;
            circles.push_back(*rel.circle);
            candidates.push_back(closest_point_on_circle(*rel.circle, s0));
        }
    }

    // Altitude disks (interior included) per ball.
    for (const Sphere& b : balls) {
        for (double z0 : {region.h_min, region.h_max}) {
            if (auto p = detail::closest_point_on_disk(b, z0, s0)) candidates.push_back(*p);
        }
    }

    // Vertices: circle x third sphere and circle x altitude plane.
    for (const Circle3D& c : circles) {
        for (const Sphere& b : balls) {
            for (const Vec3& p : circle_sphere_points(c, b)) candidates.push_back(p);
        }
        for (double z0 : {region.h_min, region.h_max}) {
            for (const Vec3& p : circle_horizontal_plane_points(c, z0)) candidates.push_back(p);
        }
    }

    bool found = false;
    Vec3 best{};
    double best_d = 0.0;
    for (const Vec3& p : candidates) {
        if (!region.contains(p, kTol)) continue;
        const double d = p.distance(s0);
        if (!found || detail::candidate_less(p, d, best, best_d)) {
            best = p;
            best_d = d;
            found = true;
        }
    }
    if (found) return {best, false};
    if (fallback_witness) return {*fallback_witness, true};
    return {region.q_prev, true};
}

}  // namespace flybs
