#include "simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace mmot::detail {

namespace {

constexpr double kPivotEps = 1e-11;

struct Tableau {
    std::size_t rows, cols;  // cols excludes the rhs column
    std::vector<std::vector<double>> t;
    std::vector<std::size_t> basis;

    double& rhs(std::size_t i) { return t[i][cols]; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = t[pr][pc];
        for (auto& v : t[pr]) v /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == pr) continue;
            const double f = t[i][pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[pr][j];
        }
        basis[pr] = pc;
    }

    /// Bland's rule: enter the lowest-index improving column, leave by the
    /// lowest basic index among ratio-test ties. Returns false when optimal.
    bool step(const std::vector<double>& cost, std::size_t enter_limit) {
        std::vector<double> dual(rows);
        for (std::size_t i = 0; i < rows; ++i) dual[i] = cost[basis[i]];

        std::size_t enter = cols;
        for (std::size_t j = 0; j < enter_limit; ++j) {
            double red = cost[j];
            for (std::size_t i = 0; i < rows; ++i) red -= dual[i] * t[i][j];
            if (red < -kPivotEps) {
                enter = j;
                break;
            }
        }
        if (enter == cols) return false;

        std::size_t leave = rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows; ++i) {
            if (t[i][enter] <= kPivotEps) continue;
            const double ratio = rhs(i) / t[i][enter];
            if (ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 &&
                 (leave == rows || basis[i] < basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == rows) return false;  // unbounded; cannot happen on a transport polytope
        pivot(leave, enter);
        return true;
    }
};

}  // namespace

LpResult solve_equality_lp(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b, const std::vector<double>& c) {
    const std::size_t m = A.size();
    const std::size_t n = c.size();

    Tableau tb;
    tb.rows = m;
    tb.cols = n + m;
    tb.t.assign(m, std::vector<double>(tb.cols + 1, 0.0));
    tb.basis.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tb.t[i][j] = A[i][j];
        tb.t[i][n + i] = 1.0;
        tb.rhs(i) = b[i];
        tb.basis[i] = n + i;
    }

    // phase 1: minimize the artificial mass
    std::vector<double> phase1(tb.cols, 0.0);
    for (std::size_t j = n; j < tb.cols; ++j) phase1[j] = 1.0;
    while (tb.step(phase1, tb.cols)) {
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (tb.basis[i] >= n) infeas += tb.rhs(i);
    LpResult res;
    if (infeas > 1e-9) return res;  // infeasible

    // drive leftover artificials out; rows with no original support are
    // redundant and dropped
    for (std::size_t i = 0; i < tb.rows;) {
        if (tb.basis[i] < n) {
            ++i;
            continue;
        }
        std::size_t piv = tb.cols;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(tb.t[i][j]) > kPivotEps) {
                piv = j;
                break;
            }
        if (piv != tb.cols) {
            tb.pivot(i, piv);
            ++i;
        } else {
            tb.t.erase(tb.t.begin() + i);
            tb.basis.erase(tb.basis.begin() + i);
            --tb.rows;
        }
    }

    // phase 2 on the original costs; artificial columns can never re-enter
    std::vector<double> phase2(tb.cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
    while (tb.step(phase2, n)) {
    }

    res.feasible = true;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < tb.rows; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.rhs(i);
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += c[j] * res.x[j];
    return res;
}

}  // namespace mmot::detail
