// SPDX-License-Identifier: Apache-2.0
//
// Brute-force LP oracle for tests: enumerate every basic point obtained by
// activating n constraints (rows as equalities plus variable bounds), keep
// the feasible ones and take the best objective. Exponential, fine for the
// tiny instances the tests generate.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lp.hpp"

namespace pnc::test {

struct OracleResult {
    bool feasible = false;
    double value = 0.0;
};

namespace detail {

// Solves a.x = b by Gaussian elimination; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(
    std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        }
        if (std::fabs(a[piv][col]) < 1e-11) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

}  // namespace detail

// All candidate equality surfaces: each constraint row, then lo and hi of
// each variable.
inline OracleResult enumerate_vertices(const LPProblem& p) {
    const std::size_t n = p.num_vars();
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& c : p.constraints) {
        rows.push_back(c.coeffs);
        rhs.push_back(c.rhs);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        rows.push_back(e);
        rhs.push_back(p.lower[j]);
        if (std::isfinite(p.upper[j])) {
            rows.push_back(e);
            rhs.push_back(p.upper[j]);
        }
    }

    OracleResult best;
    const std::size_t m = rows.size();
    // Iterate over all n-subsets of the m surfaces.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto advance = [&]() {
        std::size_t i = n;
        while (i-- > 0) {
            if (idx[i] + (n - i) < m + 0) {
                ++idx[i];
                for (std::size_t j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    if (m < n) return best;
    do {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t i : idx) {
            a.push_back(rows[i]);
            b.push_back(rhs[i]);
        }
        auto x = detail::solve_square(a, b);
        if (!x) continue;
        if (!lp_point_feasible(p, *x, 1e-7)) continue;
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += p.objective[j] * (*x)[j];
        if (!best.feasible || v < best.value) best = {true, v};
    } while (advance());
    return best;
}

}  // namespace pnc::test
