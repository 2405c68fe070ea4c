// SPDX-License-Identifier: Apache-2.0
#include "stats_bounds.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "error.hpp"

namespace pnc {

void CorrelationConstraints::validate() const {
    if (!(mu > 0.0)) fail(ErrorCode::validation, "constraints: mu must be positive");
    if (!(gamma >= 0.0)) fail(ErrorCode::validation, "constraints: gamma must be >= 0");
    if (measurements.empty()) {
        fail(ErrorCode::validation, "constraints: at least g_2 is required");
    }
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        const auto& m = measurements[i];
        if (m.order != i + 2) {
            fail(ErrorCode::validation,
                 "constraints: orders must form a prefix {2}, {2,3} or {2,3,4}");
        }
        if (m.value < 0.0 || m.sigma < 0.0) {
            fail(ErrorCode::validation, "constraints: g and sigma must be >= 0");
        }
    }
    if (measurements.size() > 3) {
        fail(ErrorCode::validation, "constraints: orders above 4 unsupported");
    }
}

unsigned CorrelationConstraints::max_order() const {
    return static_cast<unsigned>(measurements.size()) + 1;
}

LPProblem build_pn_bound_problem(const CorrelationConstraints& constraints,
                                 std::size_t n_cut, std::size_t target_n,
                                 BoundSense sense) {
    constraints.validate();
    if (n_cut < 4) fail(ErrorCode::validation, "bounds: n_cut must be >= 4");
    if (target_n > 3) fail(ErrorCode::validation, "bounds: target n must be <= 3");

    const double mu = constraints.mu;
    const unsigned kmax = constraints.max_order();
    const std::size_t np = n_cut + 1;       // p variables
    const std::size_t ng = kmax - 1;        // g variables (orders 2..kmax)
    const std::size_t nv = np + ng;
    const double big_m = static_cast<double>(n_cut + 1);

    LPProblem lp;
    lp.objective.assign(nv, 0.0);
    lp.objective[target_n] = sense == BoundSense::minimise ? 1.0 : -1.0;
    lp.lower.assign(nv, 0.0);
    lp.upper.assign(nv, 1.0);
    for (std::size_t i = 0; i < ng; ++i) {
        const auto& m = constraints.measurements[i];
        lp.lower[np + i] = std::max(0.0, m.value - constraints.gamma * m.sigma);
        lp.upper[np + i] = m.value + constraints.gamma * m.sigma;
    }

    // Probability mass window from the half-mass truncation assumption.
    std::vector<double> ones(nv, 0.0);
    std::fill(ones.begin(), ones.begin() + static_cast<long>(np), 1.0);
    lp.add_constraint(ones, Relation::le, 1.0);
    lp.add_constraint(ones, Relation::ge, 0.5);

    // Powers n^k for the moment rows.
    auto moment_row = [&](unsigned k) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t n = 0; n < np; ++n) {
            row[n] = std::pow(static_cast<double>(n), static_cast<int>(k));
        }
        return row;
    };

    // Index of the g_m variable, m >= 2.
    auto gvar = [&](unsigned m) { return np + (m - 2); };

    const double mu2 = mu * mu, mu3 = mu2 * mu, mu4 = mu3 * mu;

    for (unsigned k = 1; k <= kmax; ++k) {
        // Lower bound: sum n^k p_n >= (raw k-th moment in terms of g)/2.
        std::vector<double> lo = moment_row(k);
        if (k >= 2) lo[gvar(2)] -= (k == 2 ? mu2 : k == 3 ? 3.0 * mu2 : 7.0 * mu2) / 2.0;
        if (k >= 3) lo[gvar(3)] -= (k == 3 ? mu3 : 6.0 * mu3) / 2.0;
        if (k == 4) lo[gvar(4)] -= mu4 / 2.0;
        lp.add_constraint(std::move(lo), Relation::ge, mu / 2.0);

        // Upper bound: the tail beyond n_cut carries at least (n_cut+1)
        // photons each, which penalises the previous-order residual.
        std::vector<double> up = moment_row(k);
        std::vector<double> prev =
            k == 1 ? ones : moment_row(k - 1);  // previous-order sum
        for (std::size_t j = 0; j < nv; ++j) up[j] -= big_m * prev[j];
        double rhs = 0.0;
        switch (k) {
            case 1:
                rhs = mu - big_m;  // residual of the mass sum
                break;
            case 2:
                up[gvar(2)] -= mu2;
                rhs = mu - big_m * mu;
                break;
            case 3:
                up[gvar(3)] -= mu3;
                up[gvar(2)] -= (3.0 - big_m) * mu2;
                rhs = mu - big_m * mu;
                break;
            case 4:
                up[gvar(4)] -= mu4;
                up[gvar(3)] -= (6.0 - big_m) * mu3;
                up[gvar(2)] -= (7.0 - 3.0 * big_m) * mu2;
                rhs = mu - big_m * mu;
                break;
        }
        lp.add_constraint(std::move(up), Relation::le, rhs);
    }
    return lp;
}

ProbabilityBounds bound_photon_probabilities(
    const CorrelationConstraints& constraints, std::size_t n_cut) {
    constraints.validate();
    ProbabilityBounds out;
    out.n_cut = n_cut;
    out.mu = constraints.mu;
    out.gamma = constraints.gamma;
    for (const auto& m : constraints.measurements) out.orders.push_back(m.order);
    out.epsilon_per_constraint = std::erfc(constraints.gamma / std::sqrt(2.0));
    out.epsilon_total =
        out.epsilon_per_constraint * static_cast<double>(constraints.measurements.size());

    for (std::size_t n = 0; n < 4; ++n) {
        auto lo_lp = build_pn_bound_problem(constraints, n_cut, n, BoundSense::minimise);
        auto hi_lp = build_pn_bound_problem(constraints, n_cut, n, BoundSense::maximise);
        LPSolution lo = solve_lp(lo_lp);
        LPSolution hi = solve_lp(hi_lp);
        if (lo.status == LPStatus::infeasible || hi.status == LPStatus::infeasible) {
            fail(ErrorCode::infeasible,
                 "measured correlation intervals are inconsistent with mu "
                 "(calibration alarm)");
        }
        if (lo.status != LPStatus::optimal || hi.status != LPStatus::optimal) {
            fail(ErrorCode::validation, "bound LP unexpectedly unbounded");
        }
        out.lower[n] = std::clamp(lo.value, 0.0, 1.0);
        out.upper[n] = std::clamp(-hi.value, 0.0, 1.0);
        if (out.lower[n] > out.upper[n]) out.lower[n] = out.upper[n];
    }
    return out;
}

std::string to_json_string(const ProbabilityBounds& bounds) {
    nlohmann::ordered_json j;
    j["mu"] = bounds.mu;
    j["gamma"] = bounds.gamma;
    j["n_cut"] = bounds.n_cut;
    j["orders"] = bounds.orders;
    nlohmann::ordered_json b;
    for (std::size_t n = 0; n < 4; ++n) {
        b[std::to_string(n)] = {bounds.lower[n], bounds.upper[n]};
    }
    j["bounds"] = std::move(b);
    j["epsilon_total"] = bounds.epsilon_total;
    // Output rests on the half-mass truncation assumption; surface it.
    j["assumes_half_mass_below_n_cut"] = true;
    return j.dump(2);
}

}  // namespace pnc
