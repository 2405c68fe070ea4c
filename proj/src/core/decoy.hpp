// SPDX-License-Identifier: Apache-2.0
//
// Decoy-state propagation: lower bounds on the vacuum and single-photon
// yields from observed per-intensity gains, and the explicit upper bound
// on the single-photon error rate.
#pragma once

#include <cstddef>
#include <vector>

#include "photon_model.hpp"
#include "stats_bounds.hpp"

namespace pnc {

struct IntensitySettings {
    double u = 0.42;    // signal
    double v = 0.02;    // decoy
    double w = 1e-4;    // vacuum
    double p_u = 0.80;  // class probabilities
    double p_v = 0.15;
    double p_w = 0.05;

    void validate() const;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

enum IntensityClass { kSignal = 0, kDecoy = 1, kVacuum = 2 };

/// Observed per-intensity gain Y and error-gain B = Y*E intervals.
struct ObservedGains {
    Interval yield[3];
    Interval error_gain[3];

    void validate() const;
};

/// Photon-number probability envelope p_lower[n] <= p_n <= p_upper[n].
struct PnEnvelope {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Signal envelope from LP bounds: n in {0..3} from the bound record,
/// n >= 4 conservatively [0, 1].
PnEnvelope envelope_from_bounds(const ProbabilityBounds& bounds,
                                std::size_t n_cut);

/// Zero-width envelope of a known distribution (the ideal-Poisson reference).
PnEnvelope envelope_exact(const PhotonNumberDistribution& dist,
                          std::size_t n_cut);

struct YieldBounds {
    double y0_lower = 0.0;
    double y1_lower = 0.0;
};

/// Solves the truncated yield LP over y_0..y_{n_cut} in [0,1] with, per
/// intensity mu: sum p_lower[n] y_n <= Y_upper and
/// sum p_upper[n] y_n + Gamma_mu >= Y_lower, where Gamma_mu is the residual
/// mass 1 - sum p_lower[n]. Decoy and vacuum envelopes are exact Poisson.
/// Throws Error(infeasible) on inconsistent gain data.
YieldBounds bound_yields(const ObservedGains& observed,
                         const PnEnvelope& signal_envelope,
                         const IntensitySettings& settings,
                         std::size_t n_cut);

struct ErrorRateBound {
    double value = 0.0;
    bool clamped = false;  // true when the raw quotient left [0, 0.5]
};

/// e1_upper = (B_upper_u - p0_lower y0_lower e0_lower) / (p1_lower y1_lower),
/// clamped into [0, 1/2]. Throws Error(degenerate_denominator) when no
/// single-photon contribution is certifiable.
ErrorRateBound bound_error_rate_e1(double b_u_upper, double p0_lower,
                                   double y0_lower, double e0_lower,
                                   double p1_lower, double y1_lower);

}  // namespace pnc
