#pragma once

#include <cstdint>
#include <string>

#include "mmot/config.hpp"
#include "mmot/construct.hpp"
#include "mmot/cost.hpp"
#include "mmot/measure.hpp"
#include "mmot/plan.hpp"

namespace mmot {

/// Residuals between plan_marginal(p) and a target measure, matched by
/// exact location (locations are carried through the construction bitwise,
/// never recomputed). When the plan expands under the cap, the block-formula
/// marginal is cross-checked against per-axis dense marginals.
struct MarginalReport {
    double max_atom_residual = 0.0;
    double unmatched_atom_mass = 0.0;
    double max_cloud_residual = 0.0;
    double unmatched_cloud_mass = 0.0;
    double mass_residual = 0.0;  // net mass mismatch; catches any weight bump
    bool dense_checked = false;
    double max_dense_residual = 0.0;

    bool pass(double atom_tol, double cloud_tol) const;
};

MarginalReport check_marginals(const Plan& p, const Marginal& m, const RunConfig& cfg = {});

/// True iff every block carries the symmetrized flag and, when the dense
/// expansion fits under the cap, the expansion is invariant under every
/// adjacent slot transposition (they generate the full permutation group).
bool check_symmetry(const Plan& p, const RunConfig& cfg = {});

/// Exact optimal cost for a purely atomic marginal on k atoms and N slots:
/// a dense linear program over the k^N tuple grid (tuples with a repeated
/// location are excluded; their cost is infinite) solved by a textbook
/// two-phase simplex with Bland's rule. Returns +infinity when infeasible
/// without them. Requires k^N <= 1e4 (SizeCap).
double exact_optimum_tiny(const AtomList& atoms, int N, const OmegaSpec& w,
                          const RunConfig& cfg = {});

/// Everything a consumer needs to trust a constructed plan.
struct Certificate {
    bool pass = false;
    MarginalReport marginal;
    bool symmetry_ok = false;
    double separation = 0.0;
    double cost = 0.0;  // +inf representable
    bool cost_within_separation_bound = false;
    int arity = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
    RunConfig config;  // recorded verbatim so the knobs are auditable
    std::size_t ledger_checks = 0;
    std::size_t ledger_violations = 0;
};

Certificate certify(const Plan& p, const Marginal& m, int N, const OmegaSpec& w,
                    const RunConfig& cfg = {}, const BuildStats* stats = nullptr);

}  // namespace mmot
