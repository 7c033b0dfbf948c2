#pragma once

#include <vector>

namespace mmot::detail {

struct LpResult {
    bool feasible = false;
    double value = 0.0;
    std::vector<double> x;
};

/// Minimize c.x subject to A x = b, x >= 0 (b >= 0 required; negate rows
/// beforehand). Dense two-phase tableau simplex with Bland's rule, which
/// cannot cycle; redundant rows are tolerated (their artificials stay basic
/// at zero). Meant for tiny validation instances, not for scale.
LpResult solve_equality_lp(const std::vector<std::vector<double>>& A,
                           const std::vector<double>& b, const std::vector<double>& c);

}  // namespace mmot::detail
