#pragma once

#include <span>
#include <string>
#include <vector>

#include "mmot/config.hpp"
#include "mmot/geometry.hpp"

namespace mmot {

struct Atom {
    Point x;
    double b = 0.0;  // mass, strictly positive in a valid list
};

/// Atomic part of a measure: weights sorted non-increasing, locations
/// pairwise distinct. Use canonicalize() to restore the sort order after
/// editing.
struct AtomList {
    std::vector<Atom> entries;

    double mass() const;
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
    std::vector<double> weights() const;
};

struct Sample {
    Point x;
    double w = 0.0;
};

/// Sampled stand-in for a non-atomic measure. By convention a cloud has
/// concentration zero; validation enforces that no single sample carries a
/// macroscopic share of the mass.
struct Cloud {
    std::vector<Sample> samples;

    double mass() const;
    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
};

/// A measure on R^d split into atomic and diffuse parts. A transport
/// marginal additionally has total mass 1; that is checked by
/// validate_marginal, not by the type, so the same type can carry
/// intermediate (sub-probability) measures.
struct Marginal {
    int d = 1;
    AtomList atoms;
    Cloud diffuse;

    double mass() const { return atoms.mass() + diffuse.mass(); }
};

/// Largest single-point mass: the maximum atom weight (clouds contribute 0).
double concentration(const Marginal& m);

/// Sort atoms by weight descending, lexicographic location tie-break, and
/// merge exactly co-located atoms. Cloud samples are sorted lexicographically
/// and co-located samples merged.
void canonicalize(AtomList& atoms);
void canonicalize(Marginal& m);

/// Merge co-located samples; result sorted lexicographically.
Cloud merged_by_location(const Cloud& c);

struct ValidationIssue {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::vector<std::string> warnings;

    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

/// Report-style check that m is a constructible transport marginal for N
/// slots: total mass 1, sorted positive weights, distinct atom locations,
/// concentration < 1/N, no oversized cloud samples. An empty report means
/// the construction is guaranteed to succeed.
ValidationReport validate_marginal(const Marginal& m, int N, const RunConfig& cfg = {});

/// Length of the maximal leading run of weights so dominant that
/// (N - j) * b_j exceeds the whole remaining mass, for j = 1..result.
/// Requires b sorted non-increasing with more than N entries; the result is
/// always < N.
int fast_decreasing_prefix(std::span<const double> b, int N);

}  // namespace mmot
