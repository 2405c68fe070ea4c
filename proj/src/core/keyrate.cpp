// SPDX-License-Identifier: Apache-2.0
#include "keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace pnc {

void ChannelModel::validate() const {
    if (alpha_db_per_km < 0.0) fail(ErrorCode::validation, "alpha must be >= 0");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(detector_efficiency) || !prob(dark_click_prob) ||
        !prob(misalignment) || !prob(vacuum_error)) {
        fail(ErrorCode::validation, "channel probabilities must lie in [0,1]");
    }
}

void ProtocolParams::validate() const {
    if (!(p_z > 0.0 && p_z < 1.0)) fail(ErrorCode::validation, "p_z must lie in (0,1)");
    if (!(f >= 1.0)) fail(ErrorCode::validation, "f must be >= 1");
    if (delta < 0.0) fail(ErrorCode::validation, "delta must be >= 0");
    if (e0_lower < 0.0 || e0_lower > 0.5) {
        fail(ErrorCode::validation, "e0_lower must lie in [0, 0.5]");
    }
    intensities.validate();
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0) {
        fail(ErrorCode::domain, "binary entropy argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

double fold_gain(const PhotonNumberDistribution& dist, double eta, double y0) {
    double gain = 0.0;
    for (std::size_t n = 0; n <= dist.n_cut(); ++n) {
        double yn = 1.0 - (1.0 - y0) * std::pow(1.0 - eta, static_cast<double>(n));
        gain += dist[n] * yn;
    }
    return gain;
}

double fold_error_gain(const PhotonNumberDistribution& dist, double eta,
                       double y0, double e0, double ed) {
    double b = 0.0;
    for (std::size_t n = 0; n <= dist.n_cut(); ++n) {
        double miss = std::pow(1.0 - eta, static_cast<double>(n));
        double yn = 1.0 - (1.0 - y0) * miss;
        double bn = std::min(e0 * y0 + ed * (1.0 - miss), yn);
        b += dist[n] * bn;
    }
    return b;
}

}  // namespace

ChannelObservation simulate_channel(const PhotonNumberDistribution& signal,
                                    const PhotonNumberDistribution& decoy,
                                    const PhotonNumberDistribution& vacuum,
                                    const ChannelModel& channel,
                                    double distance_km,
                                    double relative_margin) {
    channel.validate();
    if (distance_km < 0.0) fail(ErrorCode::validation, "distance must be >= 0");
    if (relative_margin < 0.0) fail(ErrorCode::validation, "margin must be >= 0");

    double eta = channel.detector_efficiency *
                 std::pow(10.0, -channel.alpha_db_per_km * distance_km / 10.0);
    const PhotonNumberDistribution* dists[3] = {&signal, &decoy, &vacuum};

    ChannelObservation obs;
    for (int c = 0; c < 3; ++c) {
        double y = fold_gain(*dists[c], eta, channel.dark_click_prob);
        double b = fold_error_gain(*dists[c], eta, channel.dark_click_prob,
                                   channel.vacuum_error, channel.misalignment);
        obs.gains.yield[c] = {std::max(0.0, y * (1.0 - relative_margin)),
                              std::min(1.0, y * (1.0 + relative_margin))};
        obs.gains.error_gain[c] = {std::max(0.0, b * (1.0 - relative_margin)),
                                   std::min(1.0, b * (1.0 + relative_margin))};
    }
    obs.q_z = obs.gains.yield[kSignal].upper;
    double b_u = obs.gains.error_gain[kSignal].upper;
    if (obs.q_z > 0.0) {
        obs.e_z = b_u / obs.q_z;
    } else {
        obs.e_z = 0.0;
        obs.zero_gain = true;
    }
    return obs;
}

double secure_key_rate(const ProtocolParams& params, double p1_lower,
                       double y1_lower, double e1_upper, double q_z,
                       double e_z) {
    params.validate();
    if (e1_upper < 0.0 || e1_upper > 0.5) {
        fail(ErrorCode::domain, "e1_upper must lie in [0, 0.5]");
    }
    if (p1_lower < 0.0 || p1_lower > 1.0 || y1_lower < 0.0 || y1_lower > 1.0 ||
        q_z < 0.0 || q_z > 1.0 || e_z < 0.0 || e_z > 1.0) {
        fail(ErrorCode::domain, "key-rate inputs must lie in [0,1]");
    }
    double secret = p1_lower * y1_lower * (1.0 - binary_entropy(e1_upper));
    double cost = params.f * q_z * binary_entropy(e_z) + params.delta;
    return params.intensities.p_u * params.p_z * params.p_z * (secret - cost);
}

std::vector<KeyRatePoint> rate_vs_distance_scan(const ScanSpec& spec,
                                                const ChannelModel& channel,
                                                const ProtocolParams& params,
                                                const std::vector<double>& grid) {
    params.validate();
    channel.validate();
    const auto& in = params.intensities;

    PhotonNumberDistribution signal =
        spec.prepared_signal ? *spec.prepared_signal
                             : poisson_distribution(in.u, 4 * spec.n_cut);
    PhotonNumberDistribution decoy = poisson_distribution(in.v, spec.n_cut);
    PhotonNumberDistribution vacuum = poisson_distribution(in.w, spec.n_cut);

    PnEnvelope signal_env;
    double p0_lower = 0.0;
    double p1_lower = 0.0;
    if (spec.constraints) {
        ProbabilityBounds bounds =
            bound_photon_probabilities(*spec.constraints, spec.n_cut);
        signal_env = envelope_from_bounds(bounds, spec.n_cut);
        p0_lower = bounds.lower[0];
        p1_lower = bounds.lower[1];
    } else {
        signal_env = envelope_exact(signal, spec.n_cut);
        p0_lower = signal[0];
        p1_lower = signal[1];
    }

    std::vector<KeyRatePoint> out;
    out.reserve(grid.size());
    for (double distance : grid) {
        ChannelObservation obs =
            simulate_channel(signal, decoy, vacuum, channel, distance);
        YieldBounds yields =
            bound_yields(obs.gains, signal_env, in, spec.n_cut);
        ErrorRateBound e1;
        if (p1_lower * yields.y1_lower > 0.0) {
            e1 = bound_error_rate_e1(obs.gains.error_gain[kSignal].upper,
                                     p0_lower, yields.y0_lower,
                                     params.e0_lower, p1_lower,
                                     yields.y1_lower);
        } else {
            // No certifiable single-photon contribution left; the secret
            // term vanishes either way, keep the worst-case error rate.
            e1 = {0.5, true};
        }
        KeyRatePoint pt;
        pt.distance_km = distance;
        pt.q_z = obs.q_z;
        pt.e_z = obs.e_z;
        pt.p1_lower = p1_lower;
        pt.y1_lower = yields.y1_lower;
        pt.e1_upper = e1.value;
        pt.rate = secure_key_rate(params, p1_lower, yields.y1_lower, e1.value,
                                  obs.q_z, obs.e_z);
        out.push_back(pt);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.distance_km < b.distance_km;
    });
    return out;
}

}  // namespace pnc
