#include <doctest.h>

#include "flybs/propulsion.hpp"

using namespace flybs;

namespace {

// Dense scan reference for the admissible speed band.
SpeedInterval grid_interval(double cap, double v_max, const PropulsionParams& pp, int n = 10000) {
    double lo = -1.0, hi = -1.0;
    for (int i = 0; i <= n; ++i) {
        const double v = v_max * i / n;
        if (propulsion_power(v, pp) <= cap) {
            if (lo < 0.0) lo = v;
            hi = v;
        }
    }
    return {lo, hi};
}

}  // namespace

TEST_CASE("propulsion power at reference points") {
    PropulsionParams pp;  // Zeng rotary-wing reference set
    CHECK(propulsion_power(0.0, pp) == doctest::Approx(168.49).epsilon(1e-12));
    CHECK(propulsion_power(0.0, pp) ==
          doctest::Approx(pp.blade_profile_power_w + pp.induced_power_w).epsilon(1e-12));
    // frozen from a scalar evaluation of the model at v = 10
    CHECK(propulsion_power(10.0, pp) == doctest::Approx(126.0336867737212).epsilon(1e-12));
}

TEST_CASE("speed interval under the scenario cap") {
    PropulsionParams pp;
    SUBCASE("unbounded cap covers everything") {
        const SpeedInterval si = speed_interval(std::numeric_limits<double>::infinity(), 25.0, pp);
        CHECK(si.v_lo == 0.0);
        CHECK(si.v_hi == 25.0);
    }
    SUBCASE("250 W cap: hover admissible, top clipped at v_max") {
        const SpeedInterval si = speed_interval(250.0, 25.0, pp);
        CHECK(si.v_lo == 0.0);
        const SpeedInterval ref = grid_interval(250.0, 25.0, pp);
        CHECK(si.v_lo == ref.v_lo);
        CHECK(std::abs(si.v_hi - ref.v_hi) < 1e-2);
        // 250 W stays above the whole curve up to 25 m/s
        CHECK(si.v_hi == doctest::Approx(25.0));
    }
    SUBCASE("cap below hover power forces a minimum speed") {
        const double cap = 150.0;  // between the curve minimum (~126 W) and hover (168.49 W)
        const SpeedInterval si = speed_interval(cap, 25.0, pp);
        const SpeedInterval ref = grid_interval(cap, 25.0, pp);
        CHECK(si.v_lo > 0.0);
        CHECK(std::abs(si.v_lo - ref.v_lo) < 1e-2);
        CHECK(std::abs(si.v_hi - ref.v_hi) < 1e-2);
        CHECK(propulsion_power(si.v_lo, pp) <= cap);
        CHECK(propulsion_power(si.v_hi, pp) <= cap);
        // just outside the band the cap is exceeded
        CHECK(propulsion_power(si.v_lo - 1e-3, pp) > cap);
        CHECK(propulsion_power(si.v_hi + 1e-3, pp) > cap);
    }
    SUBCASE("cap at the curve minimum degenerates the interval") {
        // locate the minimum by scan, then cap exactly there
        double v_star = 0.0, p_star = propulsion_power(0.0, pp);
        for (int i = 0; i <= 100000; ++i) {
            const double v = 25.0 * i / 100000.0;
            const double p = propulsion_power(v, pp);
            if (p < p_star) {
                p_star = p;
                v_star = v;
            }
        }
        const SpeedInterval si = speed_interval(p_star, 25.0, pp);
        CHECK(std::abs(si.v_lo - v_star) < 1e-2);
        CHECK(std::abs(si.v_hi - v_star) < 1e-2);
    }
    SUBCASE("cap below the minimum is infeasible") {
        CHECK_THROWS_AS(speed_interval(100.0, 25.0, pp), SpeedInfeasible);
    }
}
