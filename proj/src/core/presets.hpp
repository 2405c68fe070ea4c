// SPDX-License-Identifier: Apache-2.0
//
// Measured correlation values for the two laser operating points, embedded
// so the reference bound and key-rate runs need no hand-typed input.
#pragma once

#include "photon_model.hpp"
#include "stats_bounds.hpp"

namespace pnc::presets {

/// Laser driven well above threshold (near-Poissonian statistics).
CorrelationConstraints above_threshold(double mu, unsigned max_order = 4,
                                       double gamma = 7.0);

/// Laser driven below threshold (quasi-thermal, strongly bunched).
CorrelationConstraints below_threshold(double mu, unsigned max_order = 4,
                                       double gamma = 7.0);

/// Thermal/Poisson mixture consistent with the below-threshold g_m values
/// (thermal weight g_2 - 1); stands in for the prepared state when the
/// quasi-thermal source feeds the channel simulation.
PhotonNumberDistribution quasi_thermal_prepared(double mu, std::size_t n_cut);

}  // namespace pnc::presets
