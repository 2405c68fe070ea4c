// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "pnc.h"

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("c api source lifecycle and correlations") {
    pnc_source* src = nullptr;
    REQUIRE(pnc_source_create_poisson(0.42, &src) == PNC_OK);
    double mu = 0.0;
    CHECK(pnc_source_mean(src, 60, &mu) == PNC_OK);
    CHECK(mu == doctest::Approx(0.42).epsilon(1e-8));
    double g = 0.0;
    CHECK(pnc_source_correlation(src, 2, 60, &g) == PNC_OK);
    CHECK(g == doctest::Approx(1.0).epsilon(1e-8));
    pnc_source_destroy(src);

    pnc_source* th = nullptr;
    REQUIRE(pnc_source_create_thermal(0.42, &th) == PNC_OK);
    CHECK(pnc_source_correlation(th, 2, 60, &g) == PNC_OK);
    CHECK(g == doctest::Approx(2.0).epsilon(1e-5));
    pnc_source_destroy(th);
}

TEST_CASE("c api error reporting") {
    pnc_source* src = nullptr;
    CHECK(pnc_source_create_poisson(-1.0, &src) == PNC_ERR_VALIDATION);
    CHECK(src == nullptr);
    CHECK(std::strlen(pnc_last_error()) > 0);
    CHECK(pnc_source_create_poisson(0.42, nullptr) == PNC_ERR_VALIDATION);
    CHECK(std::string(pnc_status_name(PNC_ERR_INFEASIBLE)).size() > 0);

    pnc_correlation g[3];
    CHECK(pnc_preset_correlations("no-such-preset", g) == PNC_ERR_VALIDATION);
}

TEST_CASE("c api simulation round trip and estimation") {
    std::string path = temp_path("pnc_capi_records.txt");
    std::remove(path.c_str());

    pnc_source* src = nullptr;
    REQUIRE(pnc_source_create_thermal(0.42, &src) == PNC_OK);
    pnc_detector_config cfg;
    pnc_detector_config_init(&cfg);
    cfg.efficiency = 0.2;  // raised with the trusted cap for quick statistics
    cfg.eta0_cap = 0.25;
    REQUIRE(pnc_simulate_to_file(src, 1000000, &cfg, 7, path.c_str()) == PNC_OK);

    pnc_counts* from_file = nullptr;
    REQUIRE(pnc_counts_read_file(path.c_str(), &from_file) == PNC_OK);
    pnc_counts* direct = nullptr;
    REQUIRE(pnc_simulate_counts(src, 1000000, &cfg, 7, &direct) == PNC_OK);

    CHECK(pnc_counts_pulses(from_file) == 1000000);
    for (int i = 0; i < 4; ++i) {
        CHECK(pnc_counts_singles(from_file, i) == pnc_counts_singles(direct, i));
    }

    pnc_correlation g[3];
    REQUIRE(pnc_estimate_correlations(from_file, g) == PNC_OK);
    CHECK(g[0].order == 2);
    CHECK(g[0].sigma > 0.0);
    CHECK(std::fabs(g[0].value - 2.0) <= 5.0 * g[0].sigma);

    pnc_counts_destroy(from_file);
    pnc_counts_destroy(direct);
    pnc_source_destroy(src);
    std::remove(path.c_str());
}

TEST_CASE("c api bounds and json record") {
    pnc_correlation g[3];
    REQUIRE(pnc_preset_correlations("paper-above-threshold", g) == PNC_OK);
    pnc_probability_bounds bounds;
    REQUIRE(pnc_bound_probabilities(g, 3, 0.42, 7.0, 25, &bounds) == PNC_OK);
    CHECK(bounds.lower[1] <= 0.2757);
    CHECK(bounds.upper[1] >= 0.2757);
    CHECK(bounds.n_orders == 3);

    size_t needed = 0;
    CHECK(pnc_bounds_to_json(&bounds, nullptr, 0, &needed) == PNC_ERR_VALIDATION);
    REQUIRE(needed > 2);
    std::string buf(needed, '\0');
    REQUIRE(pnc_bounds_to_json(&bounds, buf.data(), buf.size(), &needed) == PNC_OK);
    CHECK(buf.find("\"mu\"") != std::string::npos);

    // Inconsistent correlation data must surface as the infeasible status.
    pnc_correlation bad[1] = {{2, 5000.0, 1e-6}};
    pnc_probability_bounds out;
    CHECK(pnc_bound_probabilities(bad, 1, 0.42, 7.0, 25, &out) == PNC_ERR_INFEASIBLE);
}

TEST_CASE("c api key-rate scan") {
    pnc_correlation g[3];
    REQUIRE(pnc_preset_correlations("paper-above-threshold", g) == PNC_OK);
    pnc_channel_model ch;
    pnc_channel_model_init(&ch);
    pnc_protocol_params pp;
    pnc_protocol_params_init(&pp);
    double grid[3] = {0.0, 10.0, 20.0};
    pnc_keyrate_point constrained[3];
    REQUIRE(pnc_keyrate_scan(g, 3, 7.0, 25, &ch, &pp, nullptr, grid, 3,
                             constrained) == PNC_OK);
    pnc_keyrate_point ideal[3];
    REQUIRE(pnc_keyrate_scan(nullptr, 0, 7.0, 25, &ch, &pp, nullptr, grid, 3,
                             ideal) == PNC_OK);
    for (int i = 0; i < 3; ++i) {
        CHECK(constrained[i].distance_km == grid[i]);
        CHECK(ideal[i].rate >= constrained[i].rate - 1e-12);
        CHECK(constrained[i].rate > 0.0);
    }
}
