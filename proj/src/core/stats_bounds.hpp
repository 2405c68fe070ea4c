// SPDX-License-Identifier: Apache-2.0
//
// Worst-case bounds on the photon-number probabilities p_0..p_3 from
// measured correlation functions, via truncated factorial-moment LPs.
#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "correlation.hpp"
#include "lp.hpp"

namespace pnc {

/// Measured g_m intervals feeding the bound LPs. The measured orders must
/// form a prefix {2}, {2,3} or {2,3,4}: a g_4 without g_3 is rejected,
/// since the third-moment row is needed to relate the fourth moment to mu.
struct CorrelationConstraints {
    std::vector<CorrelationMeasurement> measurements;
    double gamma = 7.0;  // confidence half-width in standard deviations
    double mu = 0.0;     // mean photon number of the prepared state

    void validate() const;
    unsigned max_order() const;
};

struct ProbabilityBounds {
    std::array<double, 4> lower{};
    std::array<double, 4> upper{};
    std::size_t n_cut = 0;
    double mu = 0.0;
    double gamma = 0.0;
    std::vector<unsigned> orders;
    double epsilon_per_constraint = 0.0;  // Gaussian tail 2(1 - Phi(gamma))
    double epsilon_total = 0.0;           // union bound over measurements
};

enum class BoundSense { minimise, maximise };

/// Builds the truncated LP for one objective p_target. Variables are
/// p_0..p_{n_cut} plus one g_m variable per measured order; rows are the
/// half-mass window, the factorial-moment lower bounds and the
/// (n_cut+1)-penalised upper-bound chain. Moment rows above the highest
/// measured order are omitted entirely.
LPProblem build_pn_bound_problem(const CorrelationConstraints& constraints,
                                 std::size_t n_cut, std::size_t target_n,
                                 BoundSense sense);

/// Solves the min and max LPs for each of p_0..p_3 and clamps into [0,1].
/// Throws Error(infeasible) when the measured intervals are inconsistent
/// with mu -- a calibration alarm, not a numerical failure.
ProbabilityBounds bound_photon_probabilities(
    const CorrelationConstraints& constraints, std::size_t n_cut = 25);

/// Stable-key-order JSON record for certification output.
std::string to_json_string(const ProbabilityBounds& bounds);

}  // namespace pnc
