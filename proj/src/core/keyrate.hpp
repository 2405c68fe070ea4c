// SPDX-License-Identifier: Apache-2.0
//
// Fibre channel simulation (gains and QBERs per intensity) and the
// finite-size secure key rate across distance.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "decoy.hpp"
#include "photon_model.hpp"
#include "stats_bounds.hpp"

namespace pnc {

struct ChannelModel {
    double alpha_db_per_km = 0.2;
    double detector_efficiency = 0.1;
    double dark_click_prob = 1e-5;  // Y_0
    double misalignment = 0.01;     // e_d
    double vacuum_error = 0.5;      // e_0 of dark clicks

    void validate() const;
};

struct ProtocolParams {
    double p_z = 0.9;   // efficient BB84 basis bias
    double f = 1.16;    // error-correction inefficiency
    double delta = 0.0; // finite-size penalty, user-supplied constant
    double e0_lower = 0.0;  // bound fed to the e1 quotient; 0 is always sound
    IntensitySettings intensities;

    void validate() const;
};

struct ChannelObservation {
    ObservedGains gains;
    double q_z = 0.0;
    double e_z = 0.0;
    bool zero_gain = false;  // gain vanished, e_z reported as 0
};

double binary_entropy(double x);

/// Standard decoy-state channel: eta = detector_efficiency * 10^(-alpha L/10),
/// y_n = 1-(1-Y0)(1-eta)^n, error gain b_n = min(e0 Y0 + e_d(1-(1-eta)^n), y_n).
/// Gains are exact sums over each prepared distribution; intervals are
/// widened symmetrically by `relative_margin` (0 = point intervals).
ChannelObservation simulate_channel(const PhotonNumberDistribution& signal,
                                    const PhotonNumberDistribution& decoy,
                                    const PhotonNumberDistribution& vacuum,
                                    const ChannelModel& channel,
                                    double distance_km,
                                    double relative_margin = 0.0);

/// Right-hand side of the secret-fraction inequality:
/// p_u p_Z^2 { p1 y1 [1-h(e1)] - f Q_Z h(E_Z) - Delta }. May be negative;
/// presentation-layer clamping is the caller's choice.
double secure_key_rate(const ProtocolParams& params, double p1_lower,
                       double y1_lower, double e1_upper, double q_z,
                       double e_z);

struct KeyRatePoint {
    double distance_km = 0.0;
    double q_z = 0.0;
    double e_z = 0.0;
    double p1_lower = 0.0;
    double y1_lower = 0.0;
    double e1_upper = 0.0;
    double rate = 0.0;
};

/// What the scan certifies the source with: measured correlation intervals,
/// or nothing (ideal reference with the exact prepared statistics).
struct ScanSpec {
    std::optional<CorrelationConstraints> constraints;
    // Distribution actually prepared at the signal intensity; defaults to
    // Poisson(u). Drives the simulated gains in either case.
    std::optional<PhotonNumberDistribution> prepared_signal;
    std::size_t n_cut = 25;
};

std::vector<KeyRatePoint> rate_vs_distance_scan(const ScanSpec& spec,
                                                const ChannelModel& channel,
                                                const ProtocolParams& params,
                                                const std::vector<double>& grid);

}  // namespace pnc
