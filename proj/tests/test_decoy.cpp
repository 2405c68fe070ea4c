// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "decoy.hpp"
#include "error.hpp"
#include "keyrate.hpp"
#include "lp.hpp"
#include "presets.hpp"

using namespace pnc;

namespace {

constexpr std::size_t kNCut = 25;

ObservedGains exact_poisson_gains(const IntensitySettings& in, double eta,
                                  double y0, double e0, double ed) {
    ObservedGains g;
    const double mus[3] = {in.u, in.v, in.w};
    for (int c = 0; c < 3; ++c) {
        double gain = 1.0 - (1.0 - y0) * std::exp(-eta * mus[c]);
        // Error gain of the standard model, exact Poisson fold.
        double b = 0.0;
        auto pmf = poisson_pmf_truncated(mus[c], 200);
        for (std::size_t n = 0; n < pmf.size(); ++n) {
            double miss = std::pow(1.0 - eta, static_cast<double>(n));
            double yn = 1.0 - (1.0 - y0) * miss;
            b += pmf[n] * std::min(e0 * y0 + ed * (1.0 - miss), yn);
        }
        g.yield[c] = {gain, gain};
        g.error_gain[c] = {b, b};
    }
    return g;
}

}  // namespace

TEST_CASE("intensity settings validation") {
    IntensitySettings in;
    CHECK_NOTHROW(in.validate());
    in.v = 0.5;  // decoy above signal
    CHECK_THROWS_AS(in.validate(), Error);
    in = IntensitySettings{};
    in.p_u = 0.9;
    CHECK_THROWS_AS(in.validate(), Error);  // probabilities no longer sum to 1
}

TEST_CASE("lossless noiseless channel certifies the single-photon yield") {
    IntensitySettings in;
    auto env = envelope_exact(poisson_distribution(in.u, kNCut), kNCut);
    auto gains = exact_poisson_gains(in, 1.0, 0.0, 0.5, 0.0);
    auto yb = bound_yields(gains, env, in, kNCut);
    CHECK(yb.y1_lower > 0.99);   // true y_1 = 1
    CHECK(yb.y1_lower <= 1.0);
    CHECK(yb.y0_lower <= 1e-6);  // true y_0 = 0
}

TEST_CASE("saturated gains force the yields up") {
    IntensitySettings in;
    ObservedGains g;
    for (int c = 0; c < 3; ++c) {
        g.yield[c] = {1.0, 1.0};
        g.error_gain[c] = {0.0, 0.0};
    }
    auto env = envelope_exact(poisson_distribution(in.u, kNCut), kNCut);
    auto yb = bound_yields(g, env, in, kNCut);
    // The vacuum-intensity row sum p_n y_n + Gamma_w >= 1 pins y_0 near 1.
    auto pw = poisson_pmf_truncated(in.w, kNCut);
    double gamma_w = 1.0;
    for (double pn : pw) gamma_w -= pn;
    CHECK(yb.y0_lower >= 1.0 - gamma_w - 1e-6);
}

TEST_CASE("synthetic 20 km channel recovers the true single-photon yield") {
    IntensitySettings in;
    ChannelModel ch;
    double eta = ch.detector_efficiency * std::pow(10.0, -ch.alpha_db_per_km * 20.0 / 10.0);
    auto gains = exact_poisson_gains(in, eta, ch.dark_click_prob,
                                     ch.vacuum_error, ch.misalignment);
    auto env = envelope_exact(poisson_distribution(in.u, kNCut), kNCut);
    auto yb = bound_yields(gains, env, in, kNCut);
    double true_y1 = 1.0 - (1.0 - ch.dark_click_prob) * (1.0 - eta);
    CHECK(yb.y1_lower <= true_y1 + 1e-9);
    CHECK(yb.y1_lower >= 0.95 * true_y1);
    CHECK(yb.y0_lower <= ch.dark_click_prob + 1e-9);
}

TEST_CASE("error-rate bound arithmetic") {
    auto e = bound_error_rate_e1(0.01, 1.0, 0.005, 1.0, 1.0, 0.1);
    CHECK(e.value == doctest::Approx(0.05).epsilon(1e-12));
    CHECK_FALSE(e.clamped);

    auto zero = bound_error_rate_e1(0.005, 1.0, 0.005, 1.0, 1.0, 0.1);
    CHECK(zero.value == doctest::Approx(0.0));

    auto clamped = bound_error_rate_e1(0.9, 0.0, 0.0, 0.0, 1.0, 1.0);
    CHECK(clamped.value == doctest::Approx(0.5));
    CHECK(clamped.clamped);

    CHECK_THROWS_AS(bound_error_rate_e1(0.1, 0.5, 0.1, 0.0, 0.0, 0.0), Error);
}

TEST_CASE("soundness on random synthetic channels") {
    IntensitySettings in;
    auto bounds = bound_photon_probabilities(presets::above_threshold(0.42), kNCut);
    auto env = envelope_from_bounds(bounds, kNCut);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double distance = 80.0 * unif(rng);
        double y0 = 1e-4 * unif(rng);
        double ed = 0.03 * unif(rng);
        double eta = 0.1 * std::pow(10.0, -0.2 * distance / 10.0);
        auto gains = exact_poisson_gains(in, eta, y0, 0.5, ed);
        auto yb = bound_yields(gains, env, in, kNCut);

        double true_y0 = y0;
        double true_y1 = 1.0 - (1.0 - y0) * (1.0 - eta);
        double true_b1 = std::min(0.5 * y0 + ed * eta, true_y1);
        double true_e1 = true_b1 / true_y1;

        CHECK(yb.y0_lower <= true_y0 + 1e-9);
        CHECK(yb.y1_lower <= true_y1 + 1e-9);
        auto e1 = bound_error_rate_e1(gains.error_gain[kSignal].upper,
                                      bounds.lower[0], yb.y0_lower, 0.0,
                                      bounds.lower[1], yb.y1_lower);
        CHECK(e1.value >= std::min(true_e1, 0.5) - 1e-9);
    }
}

TEST_CASE("widening the gain intervals never helps") {
    IntensitySettings in;
    ChannelModel ch;
    double eta = ch.detector_efficiency * std::pow(10.0, -0.2 * 15.0 / 10.0);
    auto gains = exact_poisson_gains(in, eta, ch.dark_click_prob, 0.5,
                                     ch.misalignment);
    auto env = envelope_exact(poisson_distribution(in.u, kNCut), kNCut);
    auto tight = bound_yields(gains, env, in, kNCut);

    ObservedGains wide = gains;
    for (int c = 0; c < 3; ++c) {
        wide.yield[c].lower *= 0.95;
        wide.yield[c].upper = std::min(1.0, wide.yield[c].upper * 1.05);
        wide.error_gain[c].upper = std::min(1.0, wide.error_gain[c].upper * 1.05);
    }
    auto loose = bound_yields(wide, env, in, kNCut);
    CHECK(loose.y1_lower <= tight.y1_lower + 1e-9);
    CHECK(loose.y0_lower <= tight.y0_lower + 1e-9);
}

TEST_CASE("tighter photon-number bounds never reduce the yield bound") {
    IntensitySettings in;
    ChannelModel ch;
    double eta = ch.detector_efficiency * std::pow(10.0, -0.2 * 25.0 / 10.0);
    auto gains = exact_poisson_gains(in, eta, ch.dark_click_prob, 0.5,
                                     ch.misalignment);
    double prev = -1.0;
    for (unsigned max_order : {2u, 3u, 4u}) {
        auto bounds = bound_photon_probabilities(
            presets::above_threshold(0.42, max_order), kNCut);
        auto yb = bound_yields(gains, envelope_from_bounds(bounds, kNCut), in, kNCut);
        CHECK(yb.y1_lower >= prev - 1e-9);
        prev = yb.y1_lower;
    }
}

TEST_CASE("closed form dominates the LP route") {
    // LP route: maximise the single-photon error gain subject to the signal
    // error-gain budget, then divide by the certified yield.
    IntensitySettings in;
    auto bounds = bound_photon_probabilities(presets::above_threshold(0.42), kNCut);
    auto env = envelope_from_bounds(bounds, kNCut);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double distance = 60.0 * unif(rng);
        double y0 = 1e-4 * unif(rng);
        double ed = 0.02 * unif(rng);
        double eta = 0.1 * std::pow(10.0, -0.2 * distance / 10.0);
        auto gains = exact_poisson_gains(in, eta, y0, 0.5, ed);
        auto yb = bound_yields(gains, env, in, kNCut);
        if (bounds.lower[1] * yb.y1_lower <= 0.0) continue;

        double e0_lower = 0.0;
        auto closed = bound_error_rate_e1(gains.error_gain[kSignal].upper,
                                          bounds.lower[0], yb.y0_lower,
                                          e0_lower, bounds.lower[1],
                                          yb.y1_lower);

        LPProblem lp;
        lp.objective.assign(kNCut + 1, 0.0);
        lp.objective[1] = -1.0;  // maximise b_1
        lp.lower.assign(kNCut + 1, 0.0);
        lp.upper.assign(kNCut + 1, 1.0);
        lp.lower[0] = yb.y0_lower * e0_lower;
        std::vector<double> row(kNCut + 1, 0.0);
        for (std::size_t n = 0; n <= kNCut; ++n) row[n] = env.lower[n];
        lp.add_constraint(row, Relation::le, gains.error_gain[kSignal].upper);
        auto sol = solve_lp(lp);
        REQUIRE(sol.status == LPStatus::optimal);
        double lp_e1 = std::min(0.5, -sol.value / yb.y1_lower);
        CHECK(closed.value >= lp_e1 - 1e-9);
    }
}

TEST_CASE("inconsistent gains raise the calibration alarm") {
    IntensitySettings in;
    ObservedGains g;
    // Vacuum intensity claims near-unit gain while the signal gain is tiny.
    g.yield[kSignal] = {1e-6, 1e-6};
    g.yield[kDecoy] = {1e-6, 1e-6};
    g.yield[kVacuum] = {0.9, 0.9};
    for (int c = 0; c < 3; ++c) g.error_gain[c] = {0.0, 0.0};
    auto env = envelope_exact(poisson_distribution(in.u, kNCut), kNCut);
    try {
        bound_yields(g, env, in, kNCut);
        FAIL("expected infeasibility");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::infeasible);
    }
}
