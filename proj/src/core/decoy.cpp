// SPDX-License-Identifier: Apache-2.0
#include "decoy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "lp.hpp"

namespace pnc {

void IntensitySettings::validate() const {
    if (!(u > v && v > w && w >= 0.0)) {
        fail(ErrorCode::validation, "intensities must satisfy u > v > w >= 0");
    }
    if (!(p_u > 0.0 && p_v > 0.0 && p_w > 0.0)) {
        fail(ErrorCode::validation, "class probabilities must be positive");
    }
    if (std::abs(p_u + p_v + p_w - 1.0) > 1e-12) {
        fail(ErrorCode::validation, "class probabilities must sum to 1");
    }
}

void ObservedGains::validate() const {
    for (int c = 0; c < 3; ++c) {
        const auto& y = yield[c];
        const auto& b = error_gain[c];
        if (!(0.0 <= y.lower && y.lower <= y.upper && y.upper <= 1.0) ||
            !(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0)) {
            fail(ErrorCode::validation, "gain intervals must satisfy 0<=lo<=hi<=1");
        }
        if (b.lower > y.upper) {
            fail(ErrorCode::validation, "error gain interval exceeds gain interval");
        }
    }
}

PnEnvelope envelope_from_bounds(const ProbabilityBounds& bounds,
                                std::size_t n_cut) {
    PnEnvelope env;
    env.lower.assign(n_cut + 1, 0.0);
    env.upper.assign(n_cut + 1, 1.0);
    for (std::size_t n = 0; n < 4 && n <= n_cut; ++n) {
        env.lower[n] = bounds.lower[n];
        env.upper[n] = bounds.upper[n];
    }
    return env;
}

PnEnvelope envelope_exact(const PhotonNumberDistribution& dist,
                          std::size_t n_cut) {
    PnEnvelope env;
    env.lower.assign(n_cut + 1, 0.0);
    env.upper.assign(n_cut + 1, 0.0);
    for (std::size_t n = 0; n <= n_cut && n <= dist.n_cut(); ++n) {
        env.lower[n] = env.upper[n] = dist[n];
    }
    return env;
}

YieldBounds bound_yields(const ObservedGains& observed,
                         const PnEnvelope& signal_envelope,
                         const IntensitySettings& settings,
                         std::size_t n_cut) {
    settings.validate();
    observed.validate();
    if (signal_envelope.lower.size() != n_cut + 1 ||
        signal_envelope.upper.size() != n_cut + 1) {
        fail(ErrorCode::validation, "signal envelope size must be n_cut+1");
    }

    PnEnvelope env[3];
    env[kSignal] = signal_envelope;
    // Decoy and vacuum intensities are so weak that their statistics are
    // taken as exactly Poissonian; the truncated tail goes into Gamma.
    env[kDecoy].lower = env[kDecoy].upper = poisson_pmf_truncated(settings.v, n_cut);
    env[kVacuum].lower = env[kVacuum].upper = poisson_pmf_truncated(settings.w, n_cut);

    const std::size_t nv = n_cut + 1;
    LPProblem lp;
    lp.objective.assign(nv, 0.0);
    lp.lower.assign(nv, 0.0);
    lp.upper.assign(nv, 1.0);
    for (int c = 0; c < 3; ++c) {
        double gamma_residual =
            1.0 - std::accumulate(env[c].lower.begin(), env[c].lower.end(), 0.0);
        gamma_residual = std::max(0.0, gamma_residual);
        lp.add_constraint(env[c].lower, Relation::le, observed.yield[c].upper);
        lp.add_constraint(env[c].upper, Relation::ge,
                          observed.yield[c].lower - gamma_residual);
    }

    auto minimise = [&](std::size_t target) {
        std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
        lp.objective[target] = 1.0;
        LPSolution sol = solve_lp(lp);
        if (sol.status == LPStatus::infeasible) {
            fail(ErrorCode::infeasible,
                 "observed gains are inconsistent with the photon-number "
                 "envelope (calibration alarm)");
        }
        if (sol.status != LPStatus::optimal) {
            fail(ErrorCode::validation, "yield LP unexpectedly unbounded");
        }
        return std::clamp(sol.value, 0.0, 1.0);
    };

    YieldBounds out;
    out.y0_lower = minimise(0);
    out.y1_lower = minimise(1);
    return out;
}

ErrorRateBound bound_error_rate_e1(double b_u_upper, double p0_lower,
                                   double y0_lower, double e0_lower,
                                   double p1_lower, double y1_lower) {
    if (b_u_upper < 0.0 || p0_lower < 0.0 || y0_lower < 0.0 ||
        e0_lower < 0.0 || p1_lower < 0.0 || y1_lower < 0.0) {
        fail(ErrorCode::validation, "error-rate bound inputs must be >= 0");
    }
    double denom = p1_lower * y1_lower;
    if (denom <= 0.0) {
        fail(ErrorCode::degenerate_denominator,
             "p1_lower * y1_lower = 0: no single-photon contribution certifiable");
    }
    ErrorRateBound out;
    double raw = (b_u_upper - p0_lower * y0_lower * e0_lower) / denom;
    out.value = std::clamp(raw, 0.0, 0.5);
    out.clamped = raw != out.value;
    return out;
}

}  // namespace pnc
