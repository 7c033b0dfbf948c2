#pragma once

#include <span>
#include <vector>

#include "mmot/config.hpp"
#include "mmot/measure.hpp"

namespace mmot {

/// Unit vector used to order a cloud by projection.
struct Direction {
    std::vector<double> y;
};

/// Minimum Euclidean distance between the supports of two clouds
/// (+inf if either is empty), or between a cloud and a point.
double support_distance(const Cloud& a, const Cloud& b);
double support_distance(const Cloud& a, const Point& p);

/// Pick a direction whose projections spread the cloud: candidates are the
/// d coordinate axes plus 2d+1 seeded pseudo-random unit vectors; the winner
/// minimizes the largest mass sitting on a single projection value (ties by
/// candidate order, axes first). Throws DegenerateCloud when every candidate
/// leaves some projection value heavier than duplicate_mass_factor times the
/// heaviest sample: the cloud is an atom in disguise.
Direction choose_direction(const Cloud& c, const RunConfig& cfg = {});

/// Cut the cloud into |targets| consecutive cells along choose_direction,
/// each of mass exactly targets[j]; at most one boundary sample per cut is
/// split into two co-located fragments. The outputs re-sum to the input as
/// a measure. Requires sum(targets) == |c| within 1e-12.
std::vector<Cloud> split_exact(const Cloud& c, std::span<const double> targets,
                               const RunConfig& cfg = {});

struct GappedSplit {
    std::vector<Cloud> cells;
    Cloud remainder;
    Direction direction;
    std::vector<double> cuts;        // projection values at cell boundaries
    double min_cell_distance = 0.0;  // over non-empty cell pairs
};

/// Like split_exact but inserts a slab of mass (|c| - sum targets)/(k-1)
/// between consecutive cells so distinct cells end up at strictly positive
/// distance; the slabs (and, for k == 1, the tail) form the remainder.
/// Requires sum(targets) < |c| - 1e-12. Throws GapCollapse if projection
/// ties leave two cells touching.
GappedSplit split_gapped(const Cloud& c, std::span<const double> targets,
                         const RunConfig& cfg = {});

/// Partition of a cloud subordinate to a list of atoms: for atom i (0-based)
/// there are N-1-i pieces of mass masses[i], mutually separated and at
/// strictly positive distance from every atom; the remainder keeps the
/// leftover mass (always > 0).
struct SubordinatePartition {
    int n_slots = 0;                        // N
    std::vector<std::vector<Cloud>> pieces; // pieces[i].size() == N-1-i
    Cloud remainder;
    Direction direction;
    std::vector<double> cuts;               // projection thresholds of the cells
    double exclusion_radius = 0.0;          // final epsilon of the atom-ball exclusion
};

/// Build the subordinate partition by excluding an epsilon-ball around each
/// atom (halving epsilon from half the minimum pairwise atom distance until
/// enough mass survives) and gap-splitting the rest. Requires
/// |c| > sum_i (N-1-i) * masses[i] (0-based i), else InsufficientMass.
SubordinatePartition subordinate_partition(const Cloud& c, const std::vector<Point>& atoms,
                                           std::span<const double> masses, int N,
                                           const RunConfig& cfg = {});

}  // namespace mmot
