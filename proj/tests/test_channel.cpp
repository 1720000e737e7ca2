#include <doctest.h>

#include <random>

#include "flybs/channel.hpp"

using namespace flybs;

namespace {

ChannelParams basic_channel(double q = 1.0, double alpha = 2.0, double bw = 1e6, double noise = 1e-13,
                            double interf = 0.0) {
    ChannelParams ch;
    ch.gain_coeff = q;
    ch.pathloss_exp = alpha;
    ch.bandwidth_hz = bw;
    ch.noise_power_w = noise;
    ch.interference_w = interf;
    return ch;
}

}  // namespace

TEST_CASE("received_power basics") {
    ChannelParams ch = basic_channel();
    CHECK(received_power(0.0, 100.0, ch) == 0.0);
    CHECK(received_power(1.0, 10.0, ch) == doctest::Approx(0.01).epsilon(1e-12));

    ChannelParams ch24 = basic_channel(1.0, 2.4);
    // 0.1 * 200^-2.4, frozen from a scalar evaluation
    CHECK(received_power(0.1, 200.0, ch24) == doctest::Approx(3.00281108495358e-07).epsilon(1e-12));

    CHECK_THROWS_AS(received_power(1.0, 0.0, ch), std::domain_error);
    CHECK_THROWS_AS(received_power(-1.0, 1.0, ch), std::domain_error);
}

TEST_CASE("capacity basics and scenario-scale value") {
    ChannelParams ch = basic_channel();
    CHECK(capacity(0.0, ch) == 0.0);
    CHECK(capacity(ch.noise_power_w + ch.interference_w, ch) == doctest::Approx(1e6).epsilon(1e-12));

    // 100 MHz split over 60 nodes, -174 dBm/Hz noise density, -100 dBm
    // interference, 1 nW received. Frozen from a scalar evaluation.
    ChannelParams sc;
    sc.bandwidth_hz = 100e6 / 60.0;
    sc.noise_power_w = dbm_to_watt(-174.0) * sc.bandwidth_hz;
    sc.interference_w = dbm_to_watt(-100.0);
    CHECK(sc.noise_power_w == doctest::Approx(6.635119509224977e-15).epsilon(1e-12));
    CHECK(capacity(1e-9, sc) == doctest::Approx(21991972.592866097).epsilon(1e-12));
}

TEST_CASE("sum_capacity composition and symmetry") {
    ChannelParams ch = basic_channel(1.0, 2.4);
    std::vector<NodeState> nodes;
    nodes.push_back({0, {100.0, 0.0, 0.0}, 0.0, ch});
    std::vector<double> p{0.0};
    CHECK(sum_capacity({0, 0, 0}, nodes, p) == 0.0);

    // two identical nodes equidistant -> twice the single-node capacity
    nodes.push_back({1, {-100.0, 0.0, 0.0}, 0.0, ch});
    p = {0.02, 0.02};
    const double both = sum_capacity({0, 0, 50}, nodes, p);
    const double one = node_capacity({0, 0, 50}, nodes[0], 0.02);
    CHECK(both == doctest::Approx(2.0 * one).epsilon(1e-12));

    // random 5-node instance equals the sum of independent per-node values
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-300.0, 300.0);
    std::uniform_real_distribution<double> power(0.001, 0.1);
    std::vector<NodeState> many;
    std::vector<double> pw;
    for (int i = 0; i < 5; ++i) {
        many.push_back({i, {coord(rng), coord(rng), 0.0}, 0.0, ch});
        pw.push_back(power(rng));
    }
    const Vec3 q{10.0, -20.0, 150.0};
    double manual = 0.0;
    for (int i = 0; i < 5; ++i)
        manual += capacity(received_power(pw[i], q.distance(many[i].position), ch), ch);
    CHECK(sum_capacity(q, many, pw) == doctest::Approx(manual).epsilon(1e-12));

    CHECK_THROWS_AS(sum_capacity(many[0].position, many, pw), std::domain_error);
}

TEST_CASE("qos_radius closed form, sentinels and round-trip") {
    ChannelParams ch = basic_channel(1.0, 2.4, 1e6, 1e-13, 0.0);
    NodeState node{0, {}, 1e6, ch};

    // unit base -> radius 1 regardless of alpha
    {
        // pick p so that Q p / ((2^(C/B)-1)(N+I)) == 1
        const double snr_min = std::exp2(node.qos_min_bps / ch.bandwidth_hz) - 1.0;
        const double p = snr_min * (ch.noise_power_w + ch.interference_w);
        CHECK(qos_radius(node, p) == doctest::Approx(1.0).epsilon(1e-12));
    }

    // (10^9)^(1/2.4), frozen from a scalar evaluation
    {
        NodeState n2 = node;
        // choose qos and channel so the base is exactly 1e9: p / denom = 1e9
        const double snr_min = std::exp2(n2.qos_min_bps / n2.channel.bandwidth_hz) - 1.0;
        const double denom = snr_min * (n2.channel.noise_power_w + n2.channel.interference_w);
        const double p = 1e9 * denom;
        CHECK(qos_radius(n2, p) == doctest::Approx(5623.413251903493).epsilon(1e-12));
    }

    NodeState vacuous = node;
    vacuous.qos_min_bps = 0.0;
    CHECK(std::isinf(qos_radius(vacuous, 0.5)));
    CHECK(qos_radius(node, 0.0) == 0.0);

    // capacity at distance qos_radius reproduces the floor to 1e-9 relative
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pw(1e-6, 1.0);
    std::uniform_real_distribution<double> qos(1e4, 2e7);
    for (int i = 0; i < 200; ++i) {
        NodeState n = node;
        n.qos_min_bps = qos(rng);
        const double p = pw(rng);
        const double rho = qos_radius(n, p);
        const double c = capacity(received_power(p, rho, n.channel), n.channel);
        CHECK(c == doctest::Approx(n.qos_min_bps).epsilon(1e-9));
    }
}

TEST_CASE("channel monotonicity and bandwidth scaling") {
    ChannelParams ch = basic_channel(1.0, 2.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double p1 = u(rng), p2 = p1 + u(rng) + 1e-9;
        CHECK(capacity(p2, ch) > capacity(p1, ch));
        const double d1 = 1.0 + 500.0 * u(rng);
        const double d2 = d1 + 500.0 * u(rng) + 1e-9;
        CHECK(received_power(0.1, d2, ch) < received_power(0.1, d1, ch));
    }

    // doubling B at fixed SNR doubles capacity
    ChannelParams twice = ch;
    twice.bandwidth_hz *= 2.0;
    const double snr = 123.0;
    CHECK(capacity(snr * (twice.noise_power_w + twice.interference_w), twice) ==
          doctest::Approx(2.0 * capacity(snr * (ch.noise_power_w + ch.interference_w), ch)).epsilon(1e-12));
}

TEST_CASE("evaluation-mode fading has unit mean") {
    std::mt19937_64 rng(42);
    double mean = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) mean += rician_fading_gain(10.0, rng);
    mean /= n;
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
}
