/* SPDX-License-Identifier: Apache-2.0
 *
 * pnc -- photon-number statistics certification.
 *
 * C API over the certification core: photon-number source models, the
 * four-detector coincidence simulator, correlation estimation, worst-case
 * probability bounds from measured g_m values, and the decoy-state secure
 * key rate. All entry points return a pnc_status; on failure
 * pnc_last_error() carries a human-readable detail message for the calling
 * thread. Objects returned through ** out-parameters are owned by the
 * caller and released with the matching _destroy function.
 */
#ifndef PNC_H
#define PNC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pnc_status {
    PNC_OK = 0,
    PNC_ERR_VALIDATION = 1,          /* bad argument or configuration */
    PNC_ERR_TRUNCATION = 2,          /* tail mass beyond n_cut too large */
    PNC_ERR_INFEASIBLE = 3,          /* LP infeasible: calibration alarm */
    PNC_ERR_INSUFFICIENT_COUNTS = 4, /* a required coincidence count is zero */
    PNC_ERR_EMPTY_STREAM = 5,
    PNC_ERR_DEGENERATE = 6,          /* p1*y1 = 0 in the error-rate bound */
    PNC_ERR_DOMAIN = 7,              /* numeric argument outside its domain */
    PNC_ERR_PARSE = 8,               /* malformed record file */
    PNC_ERR_IO = 9,
    PNC_ERR_INTERNAL = 10
} pnc_status;

const char* pnc_status_name(pnc_status status);
const char* pnc_last_error(void);

/* ---- photon-number sources -------------------------------------------- */

typedef struct pnc_source pnc_source;

pnc_status pnc_source_create_poisson(double mu, pnc_source** out);
pnc_status pnc_source_create_thermal(double mu, pnc_source** out);
pnc_status pnc_source_create_single_photon(pnc_source** out);
pnc_status pnc_source_create_mixture(const pnc_source* const* components,
                                     const double* weights, size_t count,
                                     pnc_source** out);
/* Thermal/Poisson mixture matching the below-threshold correlation data. */
pnc_status pnc_source_create_quasi_thermal(double mu, pnc_source** out);
void pnc_source_destroy(pnc_source* source);

pnc_status pnc_source_mean(const pnc_source* source, size_t n_cut, double* out);
/* Analytic g_m(0) of the source, order in {2,3,4}. */
pnc_status pnc_source_correlation(const pnc_source* source, unsigned order,
                                  size_t n_cut, double* out);

/* ---- coincidence simulation and estimation ---------------------------- */

typedef struct pnc_detector_config {
    double efficiency;     /* per-photon detection probability */
    double eta0_cap;       /* trusted ceiling; efficiency must stay below */
    double split_probs[4]; /* routing probabilities, sum to 1 */
    double dark_count_prob;
} pnc_detector_config;

void pnc_detector_config_init(pnc_detector_config* cfg);

typedef struct pnc_counts pnc_counts;

/* Writes "<pulse_index> <c0><c1><c2><c3>" per pulse; byte-identical for
 * identical (source, n_pulses, cfg, seed). */
pnc_status pnc_simulate_to_file(const pnc_source* source, uint64_t n_pulses,
                                const pnc_detector_config* cfg, uint64_t seed,
                                const char* path);
pnc_status pnc_simulate_counts(const pnc_source* source, uint64_t n_pulses,
                               const pnc_detector_config* cfg, uint64_t seed,
                               pnc_counts** out);
pnc_status pnc_counts_read_file(const char* path, pnc_counts** out);
void pnc_counts_destroy(pnc_counts* counts);

uint64_t pnc_counts_pulses(const pnc_counts* counts);
uint64_t pnc_counts_singles(const pnc_counts* counts, int detector);

typedef struct pnc_correlation {
    unsigned order;
    double value;
    double sigma;
} pnc_correlation;

/* Fills out[0..2] with g_2, g_3, g_4 estimates and counting errors. */
pnc_status pnc_estimate_correlations(const pnc_counts* counts,
                                     pnc_correlation out[3]);

/* Embedded measured values: "paper-above-threshold" (near-Poissonian) or
 * "paper-below-threshold" (quasi-thermal). Fills out[0..2]. */
pnc_status pnc_preset_correlations(const char* name, pnc_correlation out[3]);

/* ---- probability bounds ----------------------------------------------- */

typedef struct pnc_probability_bounds {
    double lower[4]; /* p_0..p_3 */
    double upper[4];
    double mu;
    double gamma;
    size_t n_cut;
    unsigned orders[3];
    size_t n_orders;
    double epsilon_total;
} pnc_probability_bounds;

/* measurements must cover a prefix of orders {2}, {2,3} or {2,3,4}. */
pnc_status pnc_bound_probabilities(const pnc_correlation* measurements,
                                   size_t n_orders, double mu, double gamma,
                                   size_t n_cut,
                                   pnc_probability_bounds* out);

/* Stable-key-order JSON certification record. Returns PNC_ERR_VALIDATION
 * if the buffer is too small; needed size is written to *needed. */
pnc_status pnc_bounds_to_json(const pnc_probability_bounds* bounds, char* buf,
                              size_t buflen, size_t* needed);

/* ---- channel model and key rate --------------------------------------- */

typedef struct pnc_channel_model {
    double alpha_db_per_km;
    double detector_efficiency;
    double dark_click_prob; /* Y_0 */
    double misalignment;    /* e_d */
    double vacuum_error;    /* e_0 */
} pnc_channel_model;

void pnc_channel_model_init(pnc_channel_model* model);

typedef struct pnc_protocol_params {
    double p_z;
    double f;
    double delta;
    double e0_lower;
    double u, v, w;       /* signal/decoy/vacuum intensities */
    double p_u, p_v, p_w; /* class probabilities */
} pnc_protocol_params;

void pnc_protocol_params_init(pnc_protocol_params* params);

typedef struct pnc_keyrate_point {
    double distance_km;
    double q_z;
    double e_z;
    double p1_lower;
    double y1_lower;
    double e1_upper;
    double rate; /* may be negative; clamp at presentation if desired */
} pnc_keyrate_point;

/* Full pipeline per distance: channel simulation, yield LP, error-rate
 * bound, key rate. n_orders == 0 runs the ideal reference with the exact
 * prepared statistics and no correlation constraints. prepared may be NULL
 * for a Poisson source at intensity u. */
pnc_status pnc_keyrate_scan(const pnc_correlation* measurements,
                            size_t n_orders, double gamma, size_t n_cut,
                            const pnc_channel_model* channel,
                            const pnc_protocol_params* params,
                            const pnc_source* prepared,
                            const double* distances_km, size_t n_distances,
                            pnc_keyrate_point* out_points);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PNC_H */
