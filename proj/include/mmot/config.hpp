#pragma once

#include <cstdint>
#include <string>

namespace mmot {

/// Knobs shared by construction, cost evaluation and verification. Every
/// output artifact records the configuration (as a hash) so results can be
/// traced back to the knobs that produced them.
struct RunConfig {
    /// Seed for all pseudo-random choices (direction candidates, sample
    /// generators). Fixed seed => bit-identical outputs.
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;

    /// Atom count above which the countable-tail reduction runs before the
    /// discrete recursion. Performance knob only; correctness does not
    /// depend on it.
    int k_cutoff = 64;

    /// Exactness tolerance for mass bookkeeping (splits, ledger checks).
    double mass_tol = 1e-12;

    /// Certificate tolerances for marginal residuals.
    double atom_tol = 1e-9;
    double cloud_tol = 1e-9;

    /// Agreement tolerance between the block-formula marginal and the dense
    /// expansion marginal.
    double dual_tol = 1e-10;

    /// Cap on the full dense expansion size (tuples, permutations included)
    /// used by verification cross-checks.
    std::size_t expand_cap = 20000;

    /// Cap on support points per factor in pairwise cost sums; larger clouds
    /// are stratified down to this many representatives.
    std::size_t cost_pair_cap = 2000;

    /// A cloud sample heavier than this fraction of the cloud's mass makes
    /// the "non-atomic" convention dishonest; validation flags it.
    double max_sample_weight_fraction = 1.0 / 64.0;

    /// choose_direction declares a cloud degenerate when, in every candidate
    /// direction, some single projection value carries more than
    /// duplicate_mass_factor times the heaviest sample weight.
    double duplicate_mass_factor = 2.0;
};

/// FNV-1a hash of the canonical JSON form; embedded in certificates.
std::string config_hash(const RunConfig& cfg);

}  // namespace mmot
