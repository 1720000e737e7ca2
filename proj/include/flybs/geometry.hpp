#pragma once

#include <optional>
#include <vector>

#include "flybs/core.hpp"

namespace flybs {

struct Sphere {
    Vec3 center;
    double radius = 0.0;

    bool contains(const Vec3& p, double tol = kGeomTol) const {
        return center.distance(p) <= radius + tol;
    }
};

/// Circle embedded in 3D: center, radius, unit plane normal.
struct Circle3D {
    Vec3 center;
    double radius = 0.0;
    Vec3 unit_normal{0.0, 0.0, 1.0};

    /// Orthonormal basis (e1, e2) of the circle's plane, deterministic.
    std::pair<Vec3, Vec3> plane_basis() const {
        const Vec3 n = unit_normal;
        const Vec3 seed = std::abs(n.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
        const Vec3 e1 = (seed - n * seed.dot(n)).normalized();
        const Vec3 e2 = n.cross(e1);
        return {e1, e2};
    }
};

enum class SphereRelation { Disjoint, AInsideB, BInsideA, Intersect };

struct SphereIntersection {
    SphereRelation relation;
    std::optional<Circle3D> circle;  // set iff relation == Intersect
};

/// Classification of two distinct spheres: completely outside each other,
/// one nested in the other, or intersecting on a circle (tangency yields a
/// zero-radius circle).
inline SphereIntersection sphere_sphere_relation(const Sphere& a, const Sphere& b, double tol = kGeomTol) {
    const Vec3 axis = b.center - a.center;
    const double dist = axis.norm();

    if (dist <= tol && std::abs(a.radius - b.radius) <= tol) {
        // Identical spheres are deduplicated upstream; treat as nested.
        return {SphereRelation::AInsideB, std::nullopt};
    }
    if (dist > a.radius + b.radius + tol) return {SphereRelation::Disjoint, std::nullopt};
    if (dist + tol < std::abs(a.radius - b.radius)) {
        return {a.radius < b.radius ? SphereRelation::AInsideB : SphereRelation::BInsideA, std::nullopt};
    }

    // Radical-plane circle; clamp the radicand so tangency lands on radius 0.
    const double h = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
    Circle3D c;
    c.unit_normal = axis / dist;
    c.center = a.center + c.unit_normal * h;
    c.radius = std::sqrt(std::max(0.0, a.radius * a.radius - h * h));
    return {SphereRelation::Intersect, c};
}

/// Intersection of a sphere with the horizontal plane z = z0.
inline std::optional<Circle3D> sphere_plane_intersection(const Sphere& s, double z0, double tol = kGeomTol) {
    const double dz = z0 - s.center.z;
    const double rad2 = s.radius * s.radius - dz * dz;
    if (rad2 < -tol * std::max(1.0, s.radius)) return std::nullopt;
    Circle3D c;
    c.center = {s.center.x, s.center.y, z0};
    c.radius = std::sqrt(std::max(0.0, rad2));
    c.unit_normal = {0.0, 0.0, 1.0};
    return c;
}

/// Intersection points of two circles lying in the same horizontal plane.
inline std::vector<Vec3> circle_circle_points(const Circle3D& a, const Circle3D& b, double tol = kGeomTol) {
    if (std::abs(std::abs(a.unit_normal.z) - 1.0) > 1e-12 || std::abs(std::abs(b.unit_normal.z) - 1.0) > 1e-12 ||
        std::abs(a.center.z - b.center.z) > tol) {
        throw std::invalid_argument("circle_circle_points: circles must be coplanar and horizontal");
    }
    const double z = a.center.z;
    const double dx = b.center.x - a.center.x;
    const double dy = b.center.y - a.center.y;
    const double d = std::hypot(dx, dy);
    if (d <= tol && std::abs(a.radius - b.radius) <= tol) return {};  // identical circles
    if (d > a.radius + b.radius + tol) return {};
    if (d + tol < std::abs(a.radius - b.radius)) return {};

    const double h = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    const double s2 = a.radius * a.radius - h * h;
    const double ux = dx / d, uy = dy / d;
    const double mx = a.center.x + h * ux, my = a.center.y + h * uy;
    if (s2 <= tol * tol) return {{mx, my, z}};  // tangency
    const double s = std::sqrt(s2);
    return {{mx - s * uy, my + s * ux, z}, {mx + s * uy, my - s * ux, z}};
}

/// Closest surface point of a sphere to x; deterministic +x tie-break when
/// x coincides with the center.
inline Vec3 closest_point_on_sphere(const Sphere& s, const Vec3& x) {
    const Vec3 d = x - s.center;
    const double n = d.norm();
    if (n <= kGeomTol) return s.center + Vec3{s.radius, 0.0, 0.0};
    return s.center + d * (s.radius / n);
}

/// Closest point on a circle to x: project x to the circle plane, then
/// radially onto the circle. Degenerate axis case breaks the tie with the
/// plane's first basis vector.
inline Vec3 closest_point_on_circle(const Circle3D& c, const Vec3& x) {
    const Vec3 d = x - c.center;
    const Vec3 in_plane = d - c.unit_normal * d.dot(c.unit_normal);
    const double n = in_plane.norm();
    if (n <= kGeomTol) {
        const auto [e1, e2] = c.plane_basis();
        return c.center + e1 * c.radius;
    }
    return c.center + in_plane * (c.radius / n);
}

/// Intersection points of a (generally oriented) circle with a sphere.
/// Degenerate configurations (circle on the sphere, or concentric axis)
/// yield an empty set.
inline std::vector<Vec3> circle_sphere_points(const Circle3D& c, const Sphere& s, double tol = kGeomTol) {
    if (c.radius <= tol) {
        const double d = s.center.distance(c.center);
        if (std::abs(d - s.radius) <= std::max(tol, 1e-12 * s.radius)) return {c.center};
        return {};
    }
    const auto [e1, e2] = c.plane_basis();
    const Vec3 w = c.center - s.center;
    const double A = e1.dot(w);
    const double B = e2.dot(w);
    const double C = s.radius * s.radius - w.norm2() - c.radius * c.radius;
    const double R = std::hypot(A, B);
    const double denom = 2.0 * c.radius * R;
    if (denom <= tol * tol) return {};
    const double cosv = C / denom;
    if (cosv > 1.0 + 1e-9 || cosv < -1.0 - 1e-9) return {};
    const double phi = std::atan2(B, A);
    const double delta = std::acos(std::clamp(cosv, -1.0, 1.0));
    std::vector<Vec3> out;
    out.push_back(c.center + (e1 * std::cos(phi + delta) + e2 * std::sin(phi + delta)) * c.radius);
    if (delta > 1e-9 && delta < M_PI - 1e-9) {
        out.push_back(c.center + (e1 * std::cos(phi - delta) + e2 * std::sin(phi - delta)) * c.radius);
    }
    return out;
}

/// Intersection points of a (generally oriented) circle with the horizontal
/// plane z = z0.
inline std::vector<Vec3> circle_horizontal_plane_points(const Circle3D& c, double z0, double tol = kGeomTol) {
    if (c.radius <= tol) {
        if (std::abs(c.center.z - z0) <= tol) return {c.center};
        return {};
    }
    const auto [e1, e2] = c.plane_basis();
    const double A = e1.z, B = e2.z;
    const double R = std::hypot(A, B);
    if (R <= 1e-15) {
        // Horizontal circle: either entirely in the plane or entirely off it.
        return {};
    }
    const double cosv = (z0 - c.center.z) / (c.radius * R);
    if (cosv > 1.0 + 1e-9 || cosv < -1.0 - 1e-9) return {};
    const double phi = std::atan2(B, A);
    const double delta = std::acos(std::clamp(cosv, -1.0, 1.0));
    std::vector<Vec3> out;
    out.push_back(c.center + (e1 * std::cos(phi + delta) + e2 * std::sin(phi + delta)) * c.radius);
    if (delta > 1e-9 && delta < M_PI - 1e-9) {
        out.push_back(c.center + (e1 * std::cos(phi - delta) + e2 * std::sin(phi - delta)) * c.radius);
    }
    return out;
}

/// Extreme points of a circle in the z direction (top and bottom). For a
/// horizontal circle every point shares one z; returns the basis extremes.
inline std::pair<Vec3, Vec3> circle_z_extremes(const Circle3D& c) {
    const Vec3 n = c.unit_normal;
    Vec3 t{-n.x * n.z, -n.y * n.z, n.x * n.x + n.y * n.y};  // z-axis component orthogonal to n
    const double tn = t.norm();
    if (tn <= 1e-15) {
        const auto [e1, e2] = c.plane_basis();
        return {c.center + e1 * c.radius, c.center - e1 * c.radius};
    }
    t = t / tn;
    return {c.center + t * c.radius, c.center - t * c.radius};
}

}  // namespace flybs
