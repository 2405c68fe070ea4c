// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "photon_model.hpp"
#include "presets.hpp"
#include "stats_bounds.hpp"

using namespace pnc;

namespace {

CorrelationConstraints exact_constraints(const PhotonNumberDistribution& d,
                                         unsigned max_order) {
    CorrelationConstraints c;
    c.mu = mean_photon_number(d);
    c.gamma = 0.0;
    for (unsigned m = 2; m <= max_order; ++m) {
        c.measurements.push_back({m, correlation_from_distribution(d, m), 0.0});
    }
    return c;
}

bool interval_within(double lo_a, double hi_a, double lo_b, double hi_b,
                     double tol) {
    return lo_a >= lo_b - tol && hi_a <= hi_b + tol;
}

}  // namespace

TEST_CASE("constraint validation") {
    CorrelationConstraints c;
    c.mu = 0.42;
    c.measurements = {{3, 1.0, 0.01}};  // g3 without g2
    CHECK_THROWS_AS(c.validate(), Error);
    c.measurements = {{2, 1.0, 0.01}, {4, 1.0, 0.01}};  // gap
    CHECK_THROWS_AS(c.validate(), Error);
    c.measurements = {{2, 1.0, 0.01}};
    CHECK_NOTHROW(c.validate());
    c.mu = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("problem structure follows the measured orders") {
    auto full = presets::above_threshold(0.42);
    auto lp_full = build_pn_bound_problem(full, 25, 1, BoundSense::minimise);
    CHECK(lp_full.num_vars() == 26 + 3);  // p_0..p_25 plus g_2, g_3, g_4

    auto g2only = presets::above_threshold(0.42, 2);
    auto lp_g2 = build_pn_bound_problem(g2only, 25, 0, BoundSense::maximise);
    CHECK(lp_g2.num_vars() == 26 + 1);
    CHECK(lp_g2.constraints.size() < lp_full.constraints.size());
}

TEST_CASE("exact poisson inputs bracket the poisson pmf") {
    auto d = poisson_distribution(0.42, 25);
    auto bounds = bound_photon_probabilities(exact_constraints(d, 4), 25);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(bounds.lower[n] <= d[n] + 1e-9);
        CHECK(bounds.upper[n] >= d[n] - 1e-9);
    }
}

TEST_CASE("containment of true probabilities for synthetic sources") {
    auto thermal = thermal_distribution(0.3, 60);
    auto mix = mixture_distribution(
        {thermal_distribution(0.5, 60), poisson_distribution(0.5, 60)},
        {0.4, 0.6});
    for (const auto& d : {thermal, mix}) {
        for (unsigned max_order : {2u, 3u, 4u}) {
            auto bounds =
                bound_photon_probabilities(exact_constraints(d, max_order), 25);
            for (std::size_t n = 0; n < 4; ++n) {
                CHECK(bounds.lower[n] <= d[n] + 1e-9);
                CHECK(bounds.upper[n] >= d[n] - 1e-9);
            }
        }
    }
}

TEST_CASE("g2-only measured bounds match the published window") {
    auto bounds = bound_photon_probabilities(presets::above_threshold(0.42, 2), 25);
    CHECK(std::fabs(bounds.lower[0] - 0.580) <= 0.005);
    CHECK(std::fabs(bounds.upper[0] - 0.670) <= 0.005);
    CHECK(std::fabs(bounds.lower[1] - 0.2411) <= 0.005);
    CHECK(std::fabs(bounds.upper[1] - 0.4203) <= 0.005);
    CHECK(std::fabs(bounds.lower[2] - 0.0) <= 0.005);
    CHECK(std::fabs(bounds.upper[2] - 0.08947) <= 0.005);
}

TEST_CASE("adding higher orders only tightens") {
    ProbabilityBounds prev;
    bool have_prev = false;
    for (unsigned max_order : {2u, 3u, 4u}) {
        auto bounds =
            bound_photon_probabilities(presets::above_threshold(0.42, max_order), 25);
        if (have_prev) {
            for (std::size_t n = 0; n < 4; ++n) {
                CHECK(interval_within(bounds.lower[n], bounds.upper[n],
                                      prev.lower[n], prev.upper[n], 1e-9));
            }
        }
        prev = bounds;
        have_prev = true;
    }
}

TEST_CASE("shrinking gamma only tightens") {
    auto wide = bound_photon_probabilities(presets::above_threshold(0.42, 4, 7.0), 25);
    auto narrow = bound_photon_probabilities(presets::above_threshold(0.42, 4, 3.0), 25);
    for (std::size_t n = 0; n < 4; ++n) {
        CHECK(interval_within(narrow.lower[n], narrow.upper[n], wide.lower[n],
                              wide.upper[n], 1e-9));
    }
}

TEST_CASE("quasi-thermal vacuum bound exceeds the poisson value") {
    auto bounds = bound_photon_probabilities(presets::below_threshold(0.42), 25);
    CHECK(bounds.lower[0] > 0.657);
}

TEST_CASE("inconsistent data raises the calibration alarm") {
    // A second factorial moment this large cannot be reached below n_cut,
    // so the measured value contradicts the calibrated mean.
    CorrelationConstraints c;
    c.mu = 0.42;
    c.gamma = 7.0;
    c.measurements = {{2, 5000.0, 1e-6}};
    try {
        bound_photon_probabilities(c, 25);
        FAIL("expected infeasibility");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::infeasible);
    }
}

TEST_CASE("epsilon bookkeeping") {
    auto bounds = bound_photon_probabilities(presets::above_threshold(0.42), 25);
    CHECK(bounds.epsilon_per_constraint == doctest::Approx(2.56e-12).epsilon(0.01));
    CHECK(bounds.epsilon_total ==
          doctest::Approx(3.0 * bounds.epsilon_per_constraint).epsilon(1e-12));
}

TEST_CASE("json record is stable and complete") {
    auto bounds = bound_photon_probabilities(presets::above_threshold(0.42), 25);
    auto j = nlohmann::json::parse(to_json_string(bounds));
    CHECK(j["mu"] == doctest::Approx(0.42));
    CHECK(j["gamma"] == doctest::Approx(7.0));
    CHECK(j["n_cut"] == 25);
    CHECK(j["orders"] == nlohmann::json({2, 3, 4}));
    REQUIRE(j["bounds"].contains("0"));
    REQUIRE(j["bounds"]["0"].size() == 2);
    CHECK(j["bounds"]["0"][0] == doctest::Approx(bounds.lower[0]));
    CHECK(j.contains("epsilon_total"));
    CHECK(j["assumes_half_mass_below_n_cut"] == true);
}
