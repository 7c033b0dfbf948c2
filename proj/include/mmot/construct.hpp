#pragma once

#include <span>
#include <vector>

#include "mmot/config.hpp"
#include "mmot/measure.hpp"
#include "mmot/plan.hpp"

namespace mmot {

/// Counters for the runtime mass-ledger checks performed while building a
/// plan. A violation also throws InternalAssertion, so a finished build
/// always reports zero violations; the check count shows the ledger was
/// actually exercised.
struct BuildStats {
    std::size_t mass_checks = 0;
    std::size_t mass_violations = 0;
};

/// Split of a sorted weight vector b_1 >= ... >= b_k for the discrete
/// recursion: reduced[j] of atom j+2's weight accompanies the heaviest atom
/// into an (N-1)-slot subplan, the residual stays in an N-slot subplan.
/// Both lists are non-increasing, sum(reduced) = (N-1) b_1, and each part
/// satisfies the inequality its subplan needs.
struct WeightSplit {
    std::vector<double> reduced;   // one entry per atom 2..k
    std::vector<double> residual;  // b_j - reduced_j
};

/// Requires k >= N+2 entries and (N-1) b_1 <= b_2 + ... + b_k, else
/// ConditionViolated.
WeightSplit split_for_reduction(std::span<const double> b, int N);

/// Weights a_i >= 0 of the leave-one-out delta products for k = N+1 atoms:
/// the unique solution of sum_{j != i} a_j = b_i, namely
/// a_i = (sum b)/N - b_i. Requires b sorted non-increasing with
/// (N-1) b_1 <= b_2 + ... + b_{N+1}; throws NegativeWeight otherwise.
std::vector<double> leave_one_out_weights(std::span<const double> b, int N);

/// Monge-style plan for a pure cloud: split into 2N equal-mass cells along
/// a chosen direction and couple each point with its images under the
/// shift-by-two cell map, realized by cumulative-mass rank matching. The
/// marginal is the cloud itself and the separation is at least one full
/// intermediate cell, hence positive.
Plan plan_diffuse(const Cloud& c, int N, const RunConfig& cfg = {}, BuildStats* stats = nullptr);

/// Plan for a marginal with k <= N atoms plus a cloud. Requires
/// |c| > N b_1 - sum b_j (InsufficientMass otherwise); builds a subordinate
/// partition with masses (b_1-b_2, ..., b_k) and one scaled symmetrized
/// product block per strict weight drop, plus a diffuse plan on the
/// remainder.
Plan plan_few_atoms(const Cloud& c, const AtomList& atoms, int N, const RunConfig& cfg = {},
                    BuildStats* stats = nullptr);

/// Purely atomic plan for k > N atoms satisfying
/// (N-1) b_1 <= b_2 + ... + b_k, by double induction: weight-split the
/// heaviest atom into an (N-1)-slot subplan (extended back by averaged
/// insertion) plus an N-slot subplan on the residual weights; base cases
/// are the single-slot measure and the leave-one-out blocks for k = N+1.
Plan plan_discrete(const AtomList& atoms, int N, const RunConfig& cfg = {},
                   BuildStats* stats = nullptr);

/// Plan for k > N atoms plus a cloud when the heaviest weights may be fast
/// decreasing: build the discrete plan on the non-dominant tail, extend it
/// one pinned atom at a time (checking |P_j| = (N-j+1) q at every step),
/// and close the gap with a few-atoms plan on the cloud and the reduced
/// leading weights.
Plan plan_with_tail(const Cloud& c, const AtomList& atoms, int N, const RunConfig& cfg = {},
                    BuildStats* stats = nullptr);

/// Result of peeling the far tail of a large atom list into explicit
/// product blocks so only finitely many "real" atoms remain.
struct CountableReduction {
    Plan prefix;        // symmetrized blocks covering the peeled tail
    Marginal residual;  // what is left to construct (atoms re-canonicalized)
    std::vector<double> radii;       // ball radii around atoms 3..N+1
    std::size_t threshold = 0;       // first 0-based index eligible for peeling
    std::vector<double> tail_masses; // per-group peeled mass
    double budget = 0.0;             // (1/2) min(b_{N+1}, 1/N - b_1)
};

/// Group the atoms into N balls around atoms 3..N+1 plus the complement,
/// peel every group's tail past a common threshold into product blocks
/// (tail x one delta per other group center), and return the reduced
/// marginal. The peeled mass stays below the budget, so the residual
/// weights remain positive and the leading weight is untouched.
CountableReduction reduce_countable(const Marginal& m, int N, const RunConfig& cfg = {},
                                    BuildStats* stats = nullptr);

/// Top-level dispatcher: validate, then route by atom count (pure cloud /
/// k <= N / discrete + independent cloud / dominant-prefix tail /
/// countable reduction first). The output is symmetric, reproduces the
/// marginal, and has strictly positive separation, hence finite cost for
/// every repulsive profile.
Plan construct(const Marginal& m, int N, const RunConfig& cfg = {}, BuildStats* stats = nullptr);

}  // namespace mmot
