// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "keyrate.hpp"
#include "presets.hpp"

using namespace pnc;

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) == doctest::Approx(0.49992).epsilon(1e-4));
    for (int i = 1; i < 100; ++i) {
        double x = i / 100.0;
        CHECK(std::fabs(binary_entropy(x) - binary_entropy(1.0 - x)) <= 1e-12);
    }
    CHECK_THROWS_AS(binary_entropy(-0.01), Error);
    CHECK_THROWS_AS(binary_entropy(1.01), Error);
}

TEST_CASE("perfect detection at zero distance clicks on every non-vacuum pulse") {
    ChannelModel ch;
    ch.detector_efficiency = 1.0;
    ch.dark_click_prob = 0.0;
    ch.misalignment = 0.0;
    auto u = poisson_distribution(0.42, 40);
    auto v = poisson_distribution(0.02, 40);
    auto w = poisson_distribution(1e-4, 40);
    auto obs = simulate_channel(u, v, w, ch, 0.0);
    CHECK(obs.gains.yield[kSignal].lower == doctest::Approx(1.0 - u[0]).epsilon(1e-12));
}

TEST_CASE("vanishing gain sets the zero-gain flag") {
    ChannelModel ch;
    ch.detector_efficiency = 0.0;
    ch.dark_click_prob = 0.0;
    auto u = poisson_distribution(0.42, 40);
    auto v = poisson_distribution(0.02, 40);
    auto w = poisson_distribution(1e-4, 40);
    auto obs = simulate_channel(u, v, w, ch, 10.0);
    CHECK(obs.q_z == 0.0);
    CHECK(obs.e_z == 0.0);
    CHECK(obs.zero_gain);
}

TEST_CASE("poisson gain matches the closed form across random draws") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double mu = 0.05 + 0.95 * unif(rng);
        double distance = 80.0 * unif(rng);
        ChannelModel ch;
        ch.detector_efficiency = 0.05 + 0.15 * unif(rng);
        ch.dark_click_prob = 1e-4 * unif(rng);
        auto d = poisson_distribution(mu, 60);
        auto obs = simulate_channel(d, d, d, ch, distance);
        double eta = ch.detector_efficiency *
                     std::pow(10.0, -ch.alpha_db_per_km * distance / 10.0);
        double closed = 1.0 - (1.0 - ch.dark_click_prob) * std::exp(-eta * mu);
        CHECK(std::fabs(obs.gains.yield[kSignal].lower - closed) <= 1e-12);
    }
}

TEST_CASE("key rate formula limits") {
    ProtocolParams params;
    params.p_z = 0.999999;  // cost-free limit check wants p_Z ~ 1
    params.f = 1.0;
    params.intensities.p_u = 1.0 - 2e-9;
    params.intensities.p_v = 1e-9;
    params.intensities.p_w = 1e-9;
    double r = secure_key_rate(params, 1.0, 0.1, 0.0, 0.0, 0.0);
    CHECK(r == doctest::Approx(0.1).epsilon(1e-5));

    ProtocolParams def;
    double worst = secure_key_rate(def, 0.3, 0.1, 0.5, 0.04, 0.02);
    CHECK(worst <= 0.0);

    CHECK_THROWS_AS(secure_key_rate(def, 0.3, 0.1, 0.6, 0.04, 0.02), Error);
}

TEST_CASE("key rate monotonicity in its bounds") {
    ProtocolParams params;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double p1 = 0.1 + 0.4 * unif(rng);
        double y1 = 0.01 + 0.2 * unif(rng);
        double e1 = 0.01 + 0.3 * unif(rng);
        double qz = 0.005 + 0.05 * unif(rng);
        double ez = 0.005 + 0.05 * unif(rng);
        double base = secure_key_rate(params, p1, y1, e1, qz, ez);
        CHECK(secure_key_rate(params, p1, y1, e1 + 0.05, qz, ez) <= base + 1e-15);
        CHECK(secure_key_rate(params, p1, y1, e1, qz, std::min(0.5, ez + 0.02)) <=
              base + 1e-15);
        CHECK(secure_key_rate(params, std::min(1.0, p1 + 0.05), y1, e1, qz, ez) >=
              base - 1e-15);
        CHECK(secure_key_rate(params, p1, std::min(1.0, y1 + 0.05), e1, qz, ez) >=
              base - 1e-15);
    }
}

TEST_CASE("scan ordering and ceiling") {
    ChannelModel ch;
    ProtocolParams params;
    std::vector<double> grid = {0.0, 10.0, 25.0, 45.0};

    ScanSpec ideal;
    auto r_ideal = rate_vs_distance_scan(ideal, ch, params, grid);

    auto run = [&](unsigned max_order) {
        ScanSpec s;
        s.constraints = presets::above_threshold(0.42, max_order);
        return rate_vs_distance_scan(s, ch, params, grid);
    };
    auto r4 = run(4);
    auto r3 = run(3);
    auto r2 = run(2);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(r_ideal[i].rate >= r4[i].rate - 1e-12);
        CHECK(r4[i].rate >= r3[i].rate - 1e-12);
        CHECK(r3[i].rate >= r2[i].rate - 1e-12);
        // Information-theoretic ceiling with all costs dropped.
        double ceiling = params.intensities.p_u * params.p_z * params.p_z *
                         r4[i].p1_lower * r4[i].y1_lower;
        CHECK(r4[i].rate <= ceiling + 1e-15);
    }
}

TEST_CASE("scan output is ordered by distance") {
    ChannelModel ch;
    ProtocolParams params;
    ScanSpec ideal;
    auto pts = rate_vs_distance_scan(ideal, ch, params, {30.0, 5.0, 15.0});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].distance_km == 5.0);
    CHECK(pts[1].distance_km == 15.0);
    CHECK(pts[2].distance_km == 30.0);
}

TEST_CASE("quasi-thermal source keeps a positive rate at short distance") {
    ChannelModel ch;
    ProtocolParams params;
    ScanSpec s;
    s.constraints = presets::below_threshold(0.42);
    s.prepared_signal = presets::quasi_thermal_prepared(0.42, 4 * 25);
    auto pts = rate_vs_distance_scan(s, ch, params, {0.0, 10.0, 20.0, 30.0});
    for (const auto& p : pts) CHECK(p.rate > 0.0);
}
