// SPDX-License-Identifier: Apache-2.0
//
// extern "C" surface. Exceptions from the core are converted to status
// codes here; the message of the last failure is kept per thread.
#include "pnc.h"

#include <cstring>
#include <fstream>
#include <string>

#include "core/decoy.hpp"
#include "core/error.hpp"
#include "core/hbt.hpp"
#include "core/keyrate.hpp"
#include "core/photon_model.hpp"
#include "core/presets.hpp"
#include "core/stats_bounds.hpp"

namespace {

thread_local std::string g_last_error;

pnc_status to_status(pnc::ErrorCode code) {
    using pnc::ErrorCode;
    switch (code) {
        case ErrorCode::validation: return PNC_ERR_VALIDATION;
        case ErrorCode::truncation_too_severe: return PNC_ERR_TRUNCATION;
        case ErrorCode::zero_mean_source: return PNC_ERR_DOMAIN;
        case ErrorCode::empty_stream: return PNC_ERR_EMPTY_STREAM;
        case ErrorCode::insufficient_counts: return PNC_ERR_INSUFFICIENT_COUNTS;
        case ErrorCode::infeasible: return PNC_ERR_INFEASIBLE;
        case ErrorCode::degenerate_denominator: return PNC_ERR_DEGENERATE;
        case ErrorCode::domain: return PNC_ERR_DOMAIN;
        case ErrorCode::parse: return PNC_ERR_PARSE;
        case ErrorCode::io: return PNC_ERR_IO;
    }
    return PNC_ERR_INTERNAL;
}

template <typename Fn>
pnc_status guarded(Fn&& fn) {
    try {
        fn();
        return PNC_OK;
    } catch (const pnc::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PNC_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return PNC_ERR_INTERNAL;
    }
}

pnc_status invalid(const char* msg) {
    g_last_error = msg;
    return PNC_ERR_VALIDATION;
}

std::vector<pnc::CorrelationMeasurement> to_measurements(
    const pnc_correlation* measurements, size_t n_orders) {
    std::vector<pnc::CorrelationMeasurement> out;
    out.reserve(n_orders);
    for (size_t i = 0; i < n_orders; ++i) {
        out.push_back({measurements[i].order, measurements[i].value,
                       measurements[i].sigma});
    }
    return out;
}

}  // namespace

struct pnc_source {
    pnc::SourceKind kind;
};

struct pnc_counts {
    pnc::CoincidenceCounts counts;
};

extern "C" {

const char* pnc_status_name(pnc_status status) {
    switch (status) {
        case PNC_OK: return "ok";
        case PNC_ERR_VALIDATION: return "validation";
        case PNC_ERR_TRUNCATION: return "truncation-too-severe";
        case PNC_ERR_INFEASIBLE: return "infeasible";
        case PNC_ERR_INSUFFICIENT_COUNTS: return "insufficient-counts";
        case PNC_ERR_EMPTY_STREAM: return "empty-stream";
        case PNC_ERR_DEGENERATE: return "degenerate-denominator";
        case PNC_ERR_DOMAIN: return "domain";
        case PNC_ERR_PARSE: return "parse";
        case PNC_ERR_IO: return "io";
        case PNC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* pnc_last_error(void) { return g_last_error.c_str(); }

pnc_status pnc_source_create_poisson(double mu, pnc_source** out) {
    if (!out) return invalid("out pointer is null");
    return guarded([&] {
        pnc::SourceKind::poisson(mu).realise();  // validates mu and tail
        *out = new pnc_source{pnc::SourceKind::poisson(mu)};
    });
}

pnc_status pnc_source_create_thermal(double mu, pnc_source** out) {
    if (!out) return invalid("out pointer is null");
    return guarded([&] {
        pnc::SourceKind::thermal(mu).realise();
        *out = new pnc_source{pnc::SourceKind::thermal(mu)};
    });
}

pnc_status pnc_source_create_single_photon(pnc_source** out) {
    if (!out) return invalid("out pointer is null");
    return guarded([&] { *out = new pnc_source{pnc::SourceKind::single_photon()}; });
}

pnc_status pnc_source_create_mixture(const pnc_source* const* components,
                                     const double* weights, size_t count,
                                     pnc_source** out) {
    if (!out || !components || !weights) return invalid("null argument");
    return guarded([&] {
        std::vector<pnc::SourceKind> parts;
        parts.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!components[i]) pnc::fail(pnc::ErrorCode::validation, "null component");
            parts.push_back(components[i]->kind);
        }
        auto kind = pnc::SourceKind::mixture(std::move(parts),
                                             {weights, weights + count});
        kind.realise();
        *out = new pnc_source{std::move(kind)};
    });
}

pnc_status pnc_source_create_quasi_thermal(double mu, pnc_source** out) {
    if (!out) return invalid("out pointer is null");
    return guarded([&] {
        double w = 1.6985 - 1.0;
        auto kind = pnc::SourceKind::mixture(
            {pnc::SourceKind::thermal(mu), pnc::SourceKind::poisson(mu)},
            {w, 1.0 - w});
        kind.realise();
        *out = new pnc_source{std::move(kind)};
    });
}

void pnc_source_destroy(pnc_source* source) { delete source; }

pnc_status pnc_source_mean(const pnc_source* source, size_t n_cut, double* out) {
    if (!source || !out) return invalid("null argument");
    return guarded([&] {
        *out = pnc::mean_photon_number(source->kind.realise(n_cut));
    });
}

pnc_status pnc_source_correlation(const pnc_source* source, unsigned order,
                                  size_t n_cut, double* out) {
    if (!source || !out) return invalid("null argument");
    return guarded([&] {
        *out = pnc::correlation_from_distribution(source->kind.realise(n_cut),
                                                  order);
    });
}

void pnc_detector_config_init(pnc_detector_config* cfg) {
    if (!cfg) return;
    *cfg = {0.005, 0.01, {0.25, 0.25, 0.25, 0.25}, 0.0};
}

pnc_status pnc_simulate_to_file(const pnc_source* source, uint64_t n_pulses,
                                const pnc_detector_config* cfg, uint64_t seed,
                                const char* path) {
    if (!source || !cfg || !path) return invalid("null argument");
    return guarded([&] {
        pnc::DetectorConfig config{cfg->efficiency,
                                   cfg->eta0_cap,
                                   {cfg->split_probs[0], cfg->split_probs[1],
                                    cfg->split_probs[2], cfg->split_probs[3]},
                                   cfg->dark_count_prob};
        std::ofstream os(path, std::ios::binary);
        if (!os) pnc::fail(pnc::ErrorCode::io, std::string("cannot open ") + path);
        pnc::simulate_pulse_train(source->kind, n_pulses, config, seed,
                                  [&](const pnc::DetectionRecord& rec) {
                                      pnc::write_record(os, rec);
                                  });
        os.flush();
        if (!os) pnc::fail(pnc::ErrorCode::io, std::string("write failed: ") + path);
    });
}

pnc_status pnc_simulate_counts(const pnc_source* source, uint64_t n_pulses,
                               const pnc_detector_config* cfg, uint64_t seed,
                               pnc_counts** out) {
    if (!source || !cfg || !out) return invalid("null argument");
    return guarded([&] {
        pnc::DetectorConfig config{cfg->efficiency,
                                   cfg->eta0_cap,
                                   {cfg->split_probs[0], cfg->split_probs[1],
                                    cfg->split_probs[2], cfg->split_probs[3]},
                                   cfg->dark_count_prob};
        *out = new pnc_counts{
            pnc::simulate_counts(source->kind, n_pulses, config, seed)};
    });
}

pnc_status pnc_counts_read_file(const char* path, pnc_counts** out) {
    if (!path || !out) return invalid("null argument");
    return guarded([&] {
        std::ifstream is(path, std::ios::binary);
        if (!is) pnc::fail(pnc::ErrorCode::io, std::string("cannot open ") + path);
        auto records = pnc::read_record_file(is);
        *out = new pnc_counts{pnc::count_coincidences(records)};
    });
}

void pnc_counts_destroy(pnc_counts* counts) { delete counts; }

uint64_t pnc_counts_pulses(const pnc_counts* counts) {
    return counts ? counts->counts.n_pulses : 0;
}

uint64_t pnc_counts_singles(const pnc_counts* counts, int detector) {
    if (!counts || detector < 0 || detector >= pnc::kNumDetectors) return 0;
    return counts->counts.singles(detector);
}

pnc_status pnc_estimate_correlations(const pnc_counts* counts,
                                     pnc_correlation out[3]) {
    if (!counts || !out) return invalid("null argument");
    return guarded([&] {
        auto estimates = pnc::estimate_correlations(counts->counts);
        for (size_t i = 0; i < 3; ++i) {
            out[i] = {estimates[i].order, estimates[i].value, estimates[i].sigma};
        }
    });
}

pnc_status pnc_preset_correlations(const char* name, pnc_correlation out[3]) {
    if (!name || !out) return invalid("null argument");
    return guarded([&] {
        pnc::CorrelationConstraints c;
        if (std::strcmp(name, "paper-above-threshold") == 0) {
            c = pnc::presets::above_threshold(0.42);
        } else if (std::strcmp(name, "paper-below-threshold") == 0) {
            c = pnc::presets::below_threshold(0.42);
        } else {
            pnc::fail(pnc::ErrorCode::validation,
                      std::string("unknown preset: ") + name);
        }
        for (size_t i = 0; i < 3; ++i) {
            out[i] = {c.measurements[i].order, c.measurements[i].value,
                      c.measurements[i].sigma};
        }
    });
}

pnc_status pnc_bound_probabilities(const pnc_correlation* measurements,
                                   size_t n_orders, double mu, double gamma,
                                   size_t n_cut,
                                   pnc_probability_bounds* out) {
    if (!measurements || !out) return invalid("null argument");
    return guarded([&] {
        pnc::CorrelationConstraints c;
        c.measurements = to_measurements(measurements, n_orders);
        c.mu = mu;
        c.gamma = gamma;
        auto bounds = pnc::bound_photon_probabilities(c, n_cut);
        *out = {};
        for (size_t n = 0; n < 4; ++n) {
            out->lower[n] = bounds.lower[n];
            out->upper[n] = bounds.upper[n];
        }
        out->mu = bounds.mu;
        out->gamma = bounds.gamma;
        out->n_cut = bounds.n_cut;
        out->n_orders = bounds.orders.size();
        for (size_t i = 0; i < bounds.orders.size() && i < 3; ++i) {
            out->orders[i] = bounds.orders[i];
        }
        out->epsilon_total = bounds.epsilon_total;
    });
}

pnc_status pnc_bounds_to_json(const pnc_probability_bounds* bounds, char* buf,
                              size_t buflen, size_t* needed) {
    if (!bounds || (!buf && buflen > 0)) return invalid("null argument");
    return guarded([&] {
        pnc::ProbabilityBounds b;
        for (size_t n = 0; n < 4; ++n) {
            b.lower[n] = bounds->lower[n];
            b.upper[n] = bounds->upper[n];
        }
        b.mu = bounds->mu;
        b.gamma = bounds->gamma;
        b.n_cut = bounds->n_cut;
        b.orders.assign(bounds->orders, bounds->orders + bounds->n_orders);
        b.epsilon_per_constraint =
            bounds->n_orders > 0
                ? bounds->epsilon_total / static_cast<double>(bounds->n_orders)
                : 0.0;
        b.epsilon_total = bounds->epsilon_total;
        std::string json = pnc::to_json_string(b);
        if (needed) *needed = json.size() + 1;
        if (json.size() + 1 > buflen) {
            pnc::fail(pnc::ErrorCode::validation, "json buffer too small");
        }
        std::memcpy(buf, json.c_str(), json.size() + 1);
    });
}

void pnc_channel_model_init(pnc_channel_model* model) {
    if (!model) return;
    *model = {0.2, 0.1, 1e-5, 0.01, 0.5};
}

void pnc_protocol_params_init(pnc_protocol_params* params) {
    if (!params) return;
    *params = {0.9, 1.16, 0.0, 0.0, 0.42, 0.02, 1e-4, 0.80, 0.15, 0.05};
}

pnc_status pnc_keyrate_scan(const pnc_correlation* measurements,
                            size_t n_orders, double gamma, size_t n_cut,
                            const pnc_channel_model* channel,
                            const pnc_protocol_params* params,
                            const pnc_source* prepared,
                            const double* distances_km, size_t n_distances,
                            pnc_keyrate_point* out_points) {
    if (!channel || !params || !distances_km || !out_points) {
        return invalid("null argument");
    }
    if (n_orders > 0 && !measurements) return invalid("null measurements");
    return guarded([&] {
        pnc::ChannelModel ch{channel->alpha_db_per_km,
                             channel->detector_efficiency,
                             channel->dark_click_prob, channel->misalignment,
                             channel->vacuum_error};
        pnc::ProtocolParams pp;
        pp.p_z = params->p_z;
        pp.f = params->f;
        pp.delta = params->delta;
        pp.e0_lower = params->e0_lower;
        pp.intensities = {params->u, params->v, params->w,
                          params->p_u, params->p_v, params->p_w};
        pnc::ScanSpec spec;
        spec.n_cut = n_cut;
        if (n_orders > 0) {
            pnc::CorrelationConstraints c;
            c.measurements = to_measurements(measurements, n_orders);
            c.mu = params->u;
            c.gamma = gamma;
            spec.constraints = std::move(c);
        }
        if (prepared) {
            spec.prepared_signal = prepared->kind.realise();
        }
        std::vector<double> grid(distances_km, distances_km + n_distances);
        auto points = pnc::rate_vs_distance_scan(spec, ch, pp, grid);
        for (size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            out_points[i] = {p.distance_km, p.q_z,      p.e_z,  p.p1_lower,
                             p.y1_lower,    p.e1_upper, p.rate};
        }
    });
}

}  // extern "C"
