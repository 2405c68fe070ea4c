// SPDX-License-Identifier: Apache-2.0
#include "presets.hpp"

#include "error.hpp"

namespace pnc::presets {

namespace {

CorrelationConstraints build(double mu, unsigned max_order, double gamma,
                             const CorrelationMeasurement (&values)[3]) {
    if (max_order < 2 || max_order > 4) {
        fail(ErrorCode::validation, "preset max order must be 2, 3 or 4");
    }
    CorrelationConstraints c;
    c.mu = mu;
    c.gamma = gamma;
    for (unsigned m = 2; m <= max_order; ++m) {
        c.measurements.push_back(values[m - 2]);
    }
    return c;
}

}  // namespace

CorrelationConstraints above_threshold(double mu, unsigned max_order,
                                       double gamma) {
    static const CorrelationMeasurement values[3] = {
        {2, 1.0041, 0.0039},
        {3, 1.0059, 0.0056},
        {4, 1.099, 0.049},
    };
    return build(mu, max_order, gamma, values);
}

CorrelationConstraints below_threshold(double mu, unsigned max_order,
                                       double gamma) {
    static const CorrelationMeasurement values[3] = {
        {2, 1.6985, 0.0138},
        {3, 4.21, 0.13},
        {4, 17.11, 2.84},
    };
    return build(mu, max_order, gamma, values);
}

PhotonNumberDistribution quasi_thermal_prepared(double mu, std::size_t n_cut) {
    // For an equal-mean thermal/Poisson mixture, g_2 = 1 + thermal weight.
    double w = 1.6985 - 1.0;
    return mixture_distribution(
        {thermal_distribution(mu, n_cut), poisson_distribution(mu, n_cut)},
        {w, 1.0 - w});
}

}  // namespace pnc::presets
