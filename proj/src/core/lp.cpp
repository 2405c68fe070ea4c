// SPDX-License-Identifier: Apache-2.0
#include "lp.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace pnc {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    std::size_t m = 0;       // rows
    std::size_t n = 0;       // columns excluding rhs
    std::vector<std::vector<double>> a;  // m x n
    std::vector<double> rhs;             // m
    std::vector<int> basis;              // m, column index basic in each row

    void pivot(std::size_t row, std::size_t col,
               std::vector<double>& cost, double& cost_rhs,
               std::vector<double>* cost2, double* cost2_rhs) {
        double piv = a[row][col];
        for (std::size_t j = 0; j < n; ++j) a[row][j] /= piv;
        rhs[row] /= piv;
        a[row][col] = 1.0;
        auto eliminate = [&](std::vector<double>& r, double& r_rhs) {
            double factor = r[col];
            if (factor == 0.0) return;
            for (std::size_t j = 0; j < n; ++j) r[j] -= factor * a[row][j];
            r[col] = 0.0;
            r_rhs -= factor * rhs[row];
        };
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            eliminate(a[i], rhs[i]);
        }
        eliminate(cost, cost_rhs);
        if (cost2) eliminate(*cost2, *cost2_rhs);
        basis[row] = static_cast<int>(col);
    }

    // Bland's rule: enter the lowest-index improving column, leave on the
    // minimum ratio with ties broken by the lowest basic column index.
    // Returns optimal, or unbounded when an improving column has no limit.
    LPStatus run(std::vector<double>& cost, double& cost_rhs,
                 std::vector<double>* cost2, double* cost2_rhs,
                 const std::vector<bool>& allowed) {
        for (;;) {
            std::size_t enter = n;
            for (std::size_t j = 0; j < n; ++j) {
                if (allowed[j] && cost[j] < -kLPCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == n) return LPStatus::optimal;
            std::size_t leave = m;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (a[i][enter] <= kPivotTol) continue;
                double ratio = rhs[i] / a[i][enter];
                if (leave == m || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 &&
                     basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m) return LPStatus::unbounded;
            pivot(leave, enter, cost, cost_rhs, cost2, cost2_rhs);
        }
    }
};

// Solve B^T y = c_B by Gaussian elimination with partial pivoting.
std::vector<double> solve_transposed(const std::vector<std::vector<double>>& bt,
                                     std::vector<double> c_b) {
    std::size_t n = c_b.size();
    auto a = bt;  // n x n, a[i][j] = column basis[j] of equality row i
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        std::swap(a[k], a[p]);
        std::swap(c_b[k], c_b[p]);
        if (std::abs(a[k][k]) < 1e-13) continue;  // redundant direction
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a[i][k] / a[k][k];
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            c_b[i] -= f * c_b[k];
        }
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        if (std::abs(a[k][k]) < 1e-13) continue;
        double s = c_b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * y[j];
        y[k] = s / a[k][k];
    }
    return y;
}

}  // namespace

bool lp_point_feasible(const LPProblem& problem, const std::vector<double>& x,
                       double tol) {
    if (x.size() != problem.num_vars()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] < problem.lower[j] - tol) return false;
        if (x[j] > problem.upper[j] + tol) return false;
    }
    for (const auto& c : problem.constraints) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
        switch (c.rel) {
            case Relation::le:
                if (lhs > c.rhs + tol) return false;
                break;
            case Relation::ge:
                if (lhs < c.rhs - tol) return false;
                break;
            case Relation::eq:
                if (std::abs(lhs - c.rhs) > tol) return false;
                break;
        }
    }
    return true;
}

LPSolution solve_lp(const LPProblem& problem) {
    std::size_t nv = problem.num_vars();
    if (nv == 0) fail(ErrorCode::validation, "lp: empty objective");
    if (problem.lower.size() != nv || problem.upper.size() != nv) {
        fail(ErrorCode::validation, "lp: bound vectors must match objective size");
    }
    for (std::size_t j = 0; j < nv; ++j) {
        if (!std::isfinite(problem.lower[j])) {
            fail(ErrorCode::validation, "lp: lower bounds must be finite");
        }
        if (problem.lower[j] > problem.upper[j]) {
            fail(ErrorCode::validation, "lp: lower bound exceeds upper bound");
        }
    }
    for (const auto& c : problem.constraints) {
        if (c.coeffs.size() != nv) {
            fail(ErrorCode::validation, "lp: constraint row length mismatch");
        }
    }

    // Shift x = x' + lower so x' >= 0; finite upper bounds become rows.
    struct RowSpec {
        std::vector<double> a;
        Relation rel;
        double rhs;
        bool user;       // reported in row_duals
        bool negated;    // multiplied by -1 to make rhs nonnegative
    };
    std::vector<RowSpec> rows;
    rows.reserve(problem.constraints.size() + nv);
    for (const auto& c : problem.constraints) {
        double rhs = c.rhs;
        for (std::size_t j = 0; j < nv; ++j) rhs -= c.coeffs[j] * problem.lower[j];
        rows.push_back({c.coeffs, c.rel, rhs, true, false});
    }
    for (std::size_t j = 0; j < nv; ++j) {
        if (!std::isfinite(problem.upper[j])) continue;
        std::vector<double> a(nv, 0.0);
        a[j] = 1.0;
        rows.push_back({std::move(a), Relation::le,
                        problem.upper[j] - problem.lower[j], false, false});
    }
    for (auto& r : rows) {
        if (r.rhs < 0.0) {
            for (double& v : r.a) v = -v;
            r.rhs = -r.rhs;
            r.rel = r.rel == Relation::le   ? Relation::ge
                    : r.rel == Relation::ge ? Relation::le
                                            : Relation::eq;
            r.negated = true;
        }
    }

    std::size_t m = rows.size();
    std::size_t n_slack = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::eq) ++n_slack;
    }
    std::size_t n_art = 0;
    for (const auto& r : rows) {
        if (r.rel != Relation::le) ++n_art;
    }
    std::size_t ncols = nv + n_slack + n_art;

    Tableau t;
    t.m = m;
    t.n = ncols;
    t.a.assign(m, std::vector<double>(ncols, 0.0));
    t.rhs.resize(m);
    t.basis.assign(m, -1);

    // Equality-form copy kept for the dual back-solve at the end.
    std::vector<std::vector<double>> eq = t.a;
    std::vector<double> eq_cost(ncols, 0.0);
    for (std::size_t j = 0; j < nv; ++j) eq_cost[j] = problem.objective[j];

    std::size_t slack_at = nv;
    std::size_t art_at = nv + n_slack;
    std::vector<std::size_t> art_cols;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nv; ++j) t.a[i][j] = rows[i].a[j];
        t.rhs[i] = rows[i].rhs;
        if (rows[i].rel == Relation::le) {
            t.a[i][slack_at] = 1.0;
            t.basis[i] = static_cast<int>(slack_at);
            ++slack_at;
        } else {
            if (rows[i].rel == Relation::ge) t.a[i][slack_at++] = -1.0;
            t.a[i][art_at] = 1.0;
            t.basis[i] = static_cast<int>(art_at);
            art_cols.push_back(art_at);
            ++art_at;
        }
        eq[i] = t.a[i];
    }

    // Phase-2 cost row (shifted objective), updated alongside phase 1 so the
    // reduced costs are ready when the artificials are gone.
    std::vector<double> cost2(ncols, 0.0);
    double cost2_rhs = 0.0;
    for (std::size_t j = 0; j < nv; ++j) cost2[j] = problem.objective[j];

    std::vector<bool> allowed(ncols, true);

    if (!art_cols.empty()) {
        std::vector<double> cost1(ncols, 0.0);
        double cost1_rhs = 0.0;
        // Reduced phase-1 costs: subtract each artificial row once.
        for (std::size_t i = 0; i < m; ++i) {
            if (rows[i].rel == Relation::le) continue;
            for (std::size_t j = 0; j < ncols; ++j) cost1[j] -= t.a[i][j];
            cost1_rhs -= t.rhs[i];
        }
        for (std::size_t c : art_cols) cost1[c] = 0.0;
        LPStatus st = t.run(cost1, cost1_rhs, &cost2, &cost2_rhs, allowed);
        (void)st;  // phase 1 is always bounded below by 0
        if (-cost1_rhs > kLPFeasTol) {
            LPSolution sol;
            sol.status = LPStatus::infeasible;
            return sol;
        }
        // Drive any residual zero-level artificials out of the basis.
        for (std::size_t i = 0; i < m; ++i) {
            bool is_art = static_cast<std::size_t>(t.basis[i]) >= nv + n_slack;
            if (!is_art) continue;
            std::size_t piv_col = ncols;
            for (std::size_t j = 0; j < nv + n_slack; ++j) {
                if (std::abs(t.a[i][j]) > 1e-9) {
                    piv_col = j;
                    break;
                }
            }
            if (piv_col < ncols) {
                t.pivot(i, piv_col, cost1, cost1_rhs, &cost2, &cost2_rhs);
            }
            // else: redundant row, the artificial stays basic at level zero.
        }
        for (std::size_t c : art_cols) allowed[c] = false;
    }

    LPStatus st = t.run(cost2, cost2_rhs, nullptr, nullptr, allowed);
    LPSolution sol;
    sol.status = st;
    if (st != LPStatus::optimal) return sol;

    std::vector<double> x_shift(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        x_shift[static_cast<std::size_t>(t.basis[i])] = t.rhs[i];
    }
    sol.point.resize(nv);
    double value = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
        sol.point[j] = x_shift[j] + problem.lower[j];
        value += problem.objective[j] * sol.point[j];
    }
    sol.value = value;

    // Duals: solve B^T y = c_B on the original equality system, then undo
    // the row negations. Only user rows are reported.
    std::vector<std::vector<double>> bt(m, std::vector<double>(m));
    std::vector<double> c_b(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t col = static_cast<std::size_t>(t.basis[i]);
        for (std::size_t r = 0; r < m; ++r) bt[i][r] = eq[r][col];
        c_b[i] = eq_cost[col];
    }
    std::vector<double> y = solve_transposed(bt, std::move(c_b));
    sol.row_duals.clear();
    for (std::size_t i = 0; i < m; ++i) {
        if (!rows[i].user) break;  // user rows come first
        sol.row_duals.push_back(rows[i].negated ? -y[i] : y[i]);
    }
    return sol;
}

}  // namespace pnc
