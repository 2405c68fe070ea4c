// SPDX-License-Identifier: Apache-2.0
//
// Dense two-phase primal simplex for the small LPs built by the bound
// modules (tens of variables, tens of rows). Bland's pivoting rule is used
// throughout, so the solver cannot cycle on degenerate problems and is
// fully deterministic.
#pragma once

#include <limits>
#include <vector>

namespace pnc {

enum class Relation { le, eq, ge };

struct LPConstraint {
    std::vector<double> coeffs;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

/// min objective . x  subject to the rows and per-variable boxes.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LPProblem {
    std::vector<double> objective;
    std::vector<LPConstraint> constraints;
    std::vector<double> lower;  // one per variable
    std::vector<double> upper;  // one per variable, may be +inf

    std::size_t num_vars() const { return objective.size(); }
    void add_constraint(std::vector<double> coeffs, Relation rel, double rhs) {
        constraints.push_back({std::move(coeffs), rel, rhs});
    }
};

enum class LPStatus { optimal, infeasible, unbounded };

struct LPSolution {
    LPStatus status = LPStatus::infeasible;
    double value = 0.0;                 // defined iff optimal
    std::vector<double> point;          // defined iff optimal
    std::vector<double> row_duals;      // dual multiplier per constraint row
};

inline constexpr double kLPFeasTol = 1e-8;   // absolute constraint violation
inline constexpr double kLPCostTol = 1e-9;   // reduced-cost optimality

inline constexpr double kLPInf = std::numeric_limits<double>::infinity();

LPSolution solve_lp(const LPProblem& problem);

/// Checks that a point satisfies every row and box of the problem within
/// kLPFeasTol. Used by callers and tests alike.
bool lp_point_feasible(const LPProblem& problem, const std::vector<double>& x,
                       double tol = kLPFeasTol);

}  // namespace pnc
