#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "mmot/config.hpp"
#include "mmot/measure.hpp"

namespace mmot {

/// One slot of a product block: either an atomic measure or a cloud piece.
struct Factor {
    std::variant<AtomList, Cloud> measure;

    static Factor atomic(AtomList a) { return Factor{std::move(a)}; }
    static Factor atom(Point x, double b) {
        AtomList a;
        a.entries.push_back({std::move(x), b});
        return Factor{std::move(a)};
    }
    static Factor diffuse(Cloud c) { return Factor{std::move(c)}; }

    bool is_atomic() const { return std::holds_alternative<AtomList>(measure); }
    double mass() const;
    std::size_t support_size() const;
    int dim() const;
    void for_each(const std::function<void(const Point&, double)>& fn) const;
};

/// scale * (f_1 x ... x f_N), optionally averaged over all slot
/// permutations. Symmetrization is a flag, never an N!-fold enumeration;
/// marginals, cost and separation are all computable from the flat block.
struct ProductBlock {
    double scale = 1.0;
    bool symmetrized = false;
    std::vector<Factor> factors;

    double mass() const;
};

struct MapTuple {
    std::vector<Point> points;
    double w = 0.0;
};

/// Weighted list of explicit N-tuples (Monge-style support), optionally
/// symmetrized by flag.
struct MapBlock {
    bool symmetrized = false;
    std::vector<MapTuple> tuples;

    double mass() const;
};

using Block = std::variant<ProductBlock, MapBlock>;

/// A measure on (R^d)^N as a sum of blocks; tensor products are never
/// materialized. A finished transport plan has mass 1.
struct Plan {
    int arity = 0;
    int d = 0;
    std::vector<Block> blocks;

    double mass() const;
    bool all_symmetrized() const;
};

double block_mass(const Block& b);

/// Place f at slot j (1-based) of every block, producing a plan of arity
/// p.arity + 1. Blocks must not be symmetrized yet (insert before
/// symmetrizing); diffuse factors cannot enter map blocks.
Plan tensor_insert(const Plan& p, int slot, const Factor& f);

/// Mark every block permutation-averaged. Mass is unchanged; the marginal
/// becomes the slot-average of the input's marginals.
Plan symmetrize(Plan p);

/// The average (1/n) * sum_{j=1..n+1} (p tensor_j f) for a symmetric plan p
/// of arity n. Computed blockwise: inserting into any one slot of a
/// permutation-averaged block and rescaling by (n+1)/n gives the same
/// measure, because the n+1 insertion slots times the n! arrangements of a
/// block enumerate each (n+1)-permutation exactly once.
Plan insert_averaged(const Plan& p, const Factor& f);

/// Common marginal of a symmetrized plan (or of an arity-1 plan), as an
/// atoms+cloud measure of mass |p|. Atomic factors land in the atoms part,
/// cloud factors and map tuples in the cloud part; co-located contributions
/// are merged and the result is canonical.
Marginal plan_marginal(const Plan& p);

/// Infimum over blocks of the within-block pairwise support separation:
/// 0 means some block puts two slots at a shared location (infinite
/// repulsive cost); symmetrization does not change the value.
double min_separation(const Plan& p);

struct WeightedTuple {
    std::vector<Point> points;
    double w = 0.0;
};

/// Explicit weighted support of p as a measure on (R^d)^N, permutations of
/// symmetrized blocks enumerated and equal tuples merged. Throws
/// ExpansionTooLarge if the full expansion exceeds cap tuples.
std::vector<WeightedTuple> dense_expand(const Plan& p, std::size_t cap);

Plan plan_add(Plan p, const Plan& q);
Plan plan_scale(Plan p, double s);

}  // namespace mmot
