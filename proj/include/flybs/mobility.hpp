#pragma once

#include <random>
#include <span>
#include <vector>

#include "flybs/channel.hpp"
#include "flybs/core.hpp"

namespace flybs {

/// Motion assignment of one node.
struct MobilityModel {
    enum class Kind { RandomWalk, Cluster };
    Kind kind = Kind::RandomWalk;
    double walk_speed_ms = 1.0;  // random-walk nodes
    int cluster_id = -1;         // cluster members
};

/// A crowd cluster: its center follows a seeded random-waypoint path.
struct ClusterState {
    Vec3 center;
    Vec3 waypoint;
    double center_speed_ms = 1.0;
    double member_speed_lo = 0.6;
    double member_speed_hi = 1.4;
};

struct MobilityWorld {
    double arena_x = 600.0;
    double arena_y = 600.0;
    std::vector<MobilityModel> models;  // one per node
    std::vector<ClusterState> clusters;
    std::mt19937_64 rng{0};
};

namespace detail {

/// Mirror-reflect a coordinate into [0, limit].
inline double reflect(double v, double limit) {
    while (v < 0.0 || v > limit) {
        if (v < 0.0) v = -v;
        if (v > limit) v = 2.0 * limit - v;
    }
    return v;
}

inline Vec3 reflect_into_arena(Vec3 p, const MobilityWorld& world) {
    p.x = reflect(p.x, world.arena_x);
    p.y = reflect(p.y, world.arena_y);
    return p;
}

}  // namespace detail

/// Evaluation-scenario world: half the nodes walk randomly at 1 m/s, the other half
/// are spread over six clusters (three slow, three fast). Node altitude stays
/// at node_z.
inline MobilityWorld make_scenario_mobility(std::vector<NodeState>& nodes, double arena_x, double arena_y,
                                            std::uint64_t seed, double node_z = 0.0) {
    MobilityWorld world;
    world.arena_x = arena_x;
    world.arena_y = arena_y;
    world.rng.seed(seed);
    std::uniform_real_distribution<double> ux(0.0, arena_x);
    std::uniform_real_distribution<double> uy(0.0, arena_y);
    std::normal_distribution<double> spread(0.0, 20.0);

    world.clusters.resize(6);
    for (int c = 0; c < 6; ++c) {
        ClusterState& cl = world.clusters[c];
        cl.center = {ux(world.rng), uy(world.rng), 0.0};
        cl.waypoint = {ux(world.rng), uy(world.rng), 0.0};
        if (c < 3) {
            cl.center_speed_ms = 1.0;
            cl.member_speed_lo = 0.6;
            cl.member_speed_hi = 1.4;
        } else {
            cl.center_speed_ms = 1.6;
            cl.member_speed_lo = 1.2;
            cl.member_speed_hi = 2.0;
        }
    }

    const std::size_t n = nodes.size();
    world.models.resize(n);
    const std::size_t n_walk = n / 2;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_walk) {
            world.models[i] = {MobilityModel::Kind::RandomWalk, 1.0, -1};
            nodes[i].position = {ux(world.rng), uy(world.rng), node_z};
        } else {
            const int c = static_cast<int>((i - n_walk) % 6);
            world.models[i] = {MobilityModel::Kind::Cluster, 0.0, c};
            const ClusterState& cl = world.clusters[c];
            Vec3 p{cl.center.x + spread(world.rng), cl.center.y + spread(world.rng), node_z};
            nodes[i].position = detail::reflect_into_arena(p, world);
        }
    }
    return world;
}

/// Advance all nodes by dt. Random-walk nodes pick a fresh uniform heading
/// each step; cluster centers follow random waypoints; members move with a
/// speed drawn uniformly from the cluster's range, heading biased toward the
/// center so crowds stay loosely together.
inline void advance(MobilityWorld& world, std::vector<NodeState>& nodes, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("advance: dt must be > 0");
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> ux(0.0, world.arena_x);
    std::uniform_real_distribution<double> uy(0.0, world.arena_y);

    // Cluster centers first.
    for (std::size_t c = 0; c < world.clusters.size(); ++c) {
        ClusterState& cl = world.clusters[c];
        Vec3 to_wp = cl.waypoint - cl.center;
        to_wp.z = 0.0;
        double dist = to_wp.norm();
        if (dist < cl.center_speed_ms * dt) {
            cl.waypoint = {ux(world.rng), uy(world.rng), 0.0};
            to_wp = cl.waypoint - cl.center;
            to_wp.z = 0.0;
            dist = to_wp.norm();
        }
        const Vec3 dir = dist > 0.0 ? to_wp / dist : Vec3{1.0, 0.0, 0.0};
        cl.center = detail::reflect_into_arena(cl.center + dir * (cl.center_speed_ms * dt), world);
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const MobilityModel& m = world.models[i];
        if (m.kind == MobilityModel::Kind::RandomWalk) {
            const double a = angle(world.rng);
            const Vec3 step{std::cos(a) * m.walk_speed_ms * dt, std::sin(a) * m.walk_speed_ms * dt, 0.0};
            nodes[i].position = detail::reflect_into_arena(nodes[i].position + step, world);
        } else {
            const ClusterState& cl = world.clusters[m.cluster_id];
            std::uniform_real_distribution<double> uspeed(cl.member_speed_lo, cl.member_speed_hi);
            const double speed = uspeed(world.rng);
            const double a = angle(world.rng);
            Vec3 heading{std::cos(a), std::sin(a), 0.0};
            Vec3 to_center = cl.center - nodes[i].position;
            to_center.z = 0.0;
            heading += to_center / 60.0;  // pull toward the center, grows with distance
            heading.z = 0.0;
            heading = heading.norm() > kGeomTol ? heading / heading.norm() : Vec3{1.0, 0.0, 0.0};
            nodes[i].position =
                detail::reflect_into_arena(nodes[i].position + heading * (speed * dt), world);
        }
    }
}

}  // namespace flybs
