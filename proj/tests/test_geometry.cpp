#include <doctest.h>

#include <random>

#include "flybs/geometry.hpp"

using namespace flybs;

TEST_CASE("sphere-sphere classification") {
    SUBCASE("disjoint") {
        const auto r = sphere_sphere_relation({{0, 0, 0}, 2.0}, {{10, 0, 0}, 3.0});
        CHECK(r.relation == SphereRelation::Disjoint);
    }
    SUBCASE("nested concentric") {
        const auto r = sphere_sphere_relation({{0, 0, 0}, 1.0}, {{0, 0, 0}, 5.0});
        CHECK(r.relation == SphereRelation::AInsideB);
        const auto r2 = sphere_sphere_relation({{0, 0, 0}, 5.0}, {{0, 0, 0}, 1.0});
        CHECK(r2.relation == SphereRelation::BInsideA);
    }
    SUBCASE("symmetric intersection circle") {
        const auto r = sphere_sphere_relation({{0, 0, 0}, std::sqrt(2.0)}, {{2, 0, 0}, std::sqrt(2.0)});
        REQUIRE(r.relation == SphereRelation::Intersect);
        CHECK(r.circle->center.x == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.circle->center.y == doctest::Approx(0.0));
        CHECK(r.circle->radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(r.circle->unit_normal.x) == doctest::Approx(1.0));
    }
    SUBCASE("external tangency gives a zero-radius circle") {
        const auto r = sphere_sphere_relation({{0, 0, 0}, 1.0}, {{3, 0, 0}, 2.0});
        REQUIRE(r.relation == SphereRelation::Intersect);
        CHECK(r.circle->radius == doctest::Approx(0.0));
        CHECK(r.circle->center.x == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("relation is symmetric up to label swap on random pairs") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> c(-10.0, 10.0), rad(0.1, 8.0);
        for (int i = 0; i < 500; ++i) {
            const Sphere a{{c(rng), c(rng), c(rng)}, rad(rng)};
            const Sphere b{{c(rng), c(rng), c(rng)}, rad(rng)};
            const auto ab = sphere_sphere_relation(a, b);
            const auto ba = sphere_sphere_relation(b, a);
            if (ab.relation == SphereRelation::Disjoint) CHECK(ba.relation == SphereRelation::Disjoint);
            if (ab.relation == SphereRelation::AInsideB) CHECK(ba.relation == SphereRelation::BInsideA);
            if (ab.relation == SphereRelation::BInsideA) CHECK(ba.relation == SphereRelation::AInsideB);
            if (ab.relation == SphereRelation::Intersect) {
                REQUIRE(ba.relation == SphereRelation::Intersect);
                CHECK(ab.circle->center.distance(ba.circle->center) < 1e-9);
                CHECK(ab.circle->radius == doctest::Approx(ba.circle->radius).epsilon(1e-9));
            }
        }
    }
    SUBCASE("intersection circles satisfy both sphere equations") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> c(-5.0, 5.0), rad(1.0, 8.0), ang(0.0, 2.0 * M_PI);
        int checked = 0;
        for (int i = 0; i < 500 && checked < 200; ++i) {
            const Sphere a{{c(rng), c(rng), c(rng)}, rad(rng)};
            const Sphere b{{c(rng), c(rng), c(rng)}, rad(rng)};
            const auto rel = sphere_sphere_relation(a, b);
            if (rel.relation != SphereRelation::Intersect) continue;
            ++checked;
            const auto [e1, e2] = rel.circle->plane_basis();
            for (int k = 0; k < 8; ++k) {
                const double t = ang(rng);
                const Vec3 p =
                    rel.circle->center + (e1 * std::cos(t) + e2 * std::sin(t)) * rel.circle->radius;
                CHECK(std::abs(p.distance(a.center) - a.radius) < 1e-9);
                CHECK(std::abs(p.distance(b.center) - b.radius) < 1e-9);
            }
        }
        CHECK(checked > 50);
    }
}

TEST_CASE("sphere-plane intersection") {
    const Sphere unit{{0, 0, 0}, 1.0};
    {
        const auto c = sphere_plane_intersection(unit, 0.0);
        REQUIRE(c.has_value());
        CHECK(c->radius == doctest::Approx(1.0));
        CHECK(c->center.z == 0.0);
    }
    CHECK_FALSE(sphere_plane_intersection(unit, 2.0).has_value());
    {
        const auto c = sphere_plane_intersection({{1, 1, 1}, 2.0}, 2.0);
        REQUIRE(c.has_value());
        CHECK(c->center.x == doctest::Approx(1.0));
        CHECK(c->center.y == doctest::Approx(1.0));
        CHECK(c->center.z == doctest::Approx(2.0));
        CHECK(c->radius == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    }
}

TEST_CASE("coplanar circle-circle intersection points") {
    const double h = 4.0;
    Circle3D a{{0, 0, h}, 1.0, {0, 0, 1}};
    Circle3D b{{2, 0, h}, 1.0, {0, 0, 1}};
    SUBCASE("external tangency -> single point") {
        const auto pts = circle_circle_points(a, b);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0].distance({1, 0, h}) < 1e-9);
    }
    SUBCASE("disjoint -> empty") {
        b.center.x = 5.0;
        CHECK(circle_circle_points(a, b).empty());
    }
    SUBCASE("two proper intersections") {
        b.center = {1, 0, 0};
        a.center = {0, 0, 0};
        const auto pts = circle_circle_points(a, b);
        REQUIRE(pts.size() == 2);
        const double s3 = std::sqrt(3.0) / 2.0;
        CHECK(std::min(pts[0].distance({0.5, s3, 0}), pts[0].distance({0.5, -s3, 0})) < 1e-9);
        CHECK(std::min(pts[1].distance({0.5, s3, 0}), pts[1].distance({0.5, -s3, 0})) < 1e-9);
        CHECK(pts[0].distance(pts[1]) > 1e-9);
        for (const Vec3& p : pts) {
            CHECK(std::abs(p.distance(a.center) - a.radius) < 1e-9);
            CHECK(std::abs(p.distance(b.center) - b.radius) < 1e-9);
        }
    }
    SUBCASE("non-coplanar input is rejected") {
        b.center = {1, 0, h + 1.0};
        CHECK_THROWS_AS(circle_circle_points(a, b), std::invalid_argument);
    }
}

TEST_CASE("closest point on sphere") {
    const Sphere unit{{0, 0, 0}, 1.0};
    CHECK(closest_point_on_sphere(unit, {2, 0, 0}).distance({1, 0, 0}) < 1e-12);
    const Vec3 on{0.0, 1.0, 0.0};
    CHECK(closest_point_on_sphere(unit, on).distance(on) < 1e-12);
    CHECK(closest_point_on_sphere({{1, 1, 1}, 2.0}, {4, 1, 1}).distance({3, 1, 1}) < 1e-12);
    // center input resolves deterministically
    CHECK(closest_point_on_sphere(unit, {0, 0, 0}).distance({1, 0, 0}) < 1e-12);
}

TEST_CASE("closest point on circle") {
    Circle3D c{{0, 0, 0}, 1.0, {0, 0, 1}};
    CHECK(closest_point_on_circle(c, {3, 0, 5}).distance({1, 0, 0}) < 1e-12);
    CHECK(closest_point_on_circle(c, {0, 1, 0}).distance({0, 1, 0}) < 1e-12);
    // point on the circle axis -> deterministic basis tie-break
    const Vec3 tie = closest_point_on_circle(c, {0, 0, 7});
    CHECK(tie.distance({1, 0, 0}) < 1e-12);
}

TEST_CASE("closest points beat random surface samples") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(0.0, 2.0 * M_PI);
    const Sphere s{{1.0, -2.0, 3.0}, 4.0};
    const Circle3D c{{0.5, 0.25, -1.0}, 2.5, Vec3{1.0, 2.0, -0.5}.normalized()};
    const Vec3 x{5.0, 4.0, -2.0};
    const double ds = closest_point_on_sphere(s, x).distance(x);
    const double dc = closest_point_on_circle(c, x).distance(x);
    const auto [e1, e2] = c.plane_basis();
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const Vec3 dir = Vec3{n01(rng), n01(rng), n01(rng)}.normalized();
        CHECK(ds <= (s.center + dir * s.radius).distance(x) + 1e-6);
        const double t = ang(rng);
        const Vec3 pc = c.center + (e1 * std::cos(t) + e2 * std::sin(t)) * c.radius;
        CHECK(dc <= pc.distance(x) + 1e-6);
    }
}

TEST_CASE("circle-sphere and circle-plane vertex helpers") {
    // circle of two unit-offset spheres against a third sphere
    const auto rel = sphere_sphere_relation({{0, 0, 0}, 2.0}, {{2, 0, 0}, 2.0});
    REQUIRE(rel.relation == SphereRelation::Intersect);
    const Sphere third{{1, 0, 2}, 2.0};
    const auto pts = circle_sphere_points(*rel.circle, third);
    CHECK(!pts.empty());
    for (const Vec3& p : pts) {
        CHECK(std::abs(p.distance({0, 0, 0}) - 2.0) < 1e-9);
        CHECK(std::abs(p.distance({2, 0, 0}) - 2.0) < 1e-9);
        CHECK(std::abs(p.distance(third.center) - third.radius) < 1e-9);
    }

    // vertical circle crossing a horizontal plane
    Circle3D vert{{0, 0, 0}, 2.0, {1, 0, 0}};
    const auto cpts = circle_horizontal_plane_points(vert, 1.0);
    REQUIRE(cpts.size() == 2);
    for (const Vec3& p : cpts) {
        CHECK(p.z == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs((p - vert.center).norm() - 2.0) < 1e-9);
    }

    const auto [top, bot] = circle_z_extremes(vert);
    CHECK(top.z == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(bot.z == doctest::Approx(-2.0).epsilon(1e-12));
}
