#include "mmot/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mmot/errors.hpp"
#include "mmot/rng.hpp"

namespace mmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> direction_candidates(int d, const RunConfig& cfg) {
    std::vector<std::vector<double>> cands;
    for (int i = 0; i < d; ++i) {
        std::vector<double> axis(d, 0.0);
        axis[i] = 1.0;
        cands.push_back(std::move(axis));
    }
    Rng rng(cfg.seed);
    for (int i = 0; i < 2 * d + 1; ++i) cands.push_back(rng.unit_vector(d));
    return cands;
}

/// Heaviest mass sitting on a single projection value of c along y.
double max_projection_tie(const Cloud& c, const std::vector<double>& y) {
    std::map<double, double> mass_at;
    for (const auto& s : c.samples) mass_at[dot(s.x.coords, y)] += s.w;
    double worst = 0.0;
    for (const auto& [p, w] : mass_at) worst = std::max(worst, w);
    return worst;
}

struct OrderedSample {
    double proj;
    Point x;
    double w;
};

std::vector<OrderedSample> order_along(const Cloud& c, const Direction& dir) {
    std::vector<std::size_t> idx(c.samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> proj(c.samples.size());
    for (std::size_t i = 0; i < c.samples.size(); ++i)
        proj[i] = dot(c.samples[i].x.coords, dir.y);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (proj[a] != proj[b]) return proj[a] < proj[b];
        if (!(c.samples[a].x == c.samples[b].x))
            return lex_less(c.samples[a].x, c.samples[b].x);
        return a < b;
    });
    std::vector<OrderedSample> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back({proj[i], c.samples[i].x, c.samples[i].w});
    return out;
}

/// Consume the ordered samples into consecutive segments of the given
/// masses, splitting at most one boundary sample per cut; whatever is left
/// after the final segment is appended to it.
std::vector<Cloud> cut_by_mass(std::vector<OrderedSample> ordered,
                               std::span<const double> seg_masses) {
    std::vector<Cloud> segments(seg_masses.size());
    std::size_t cur = 0;
    for (std::size_t j = 0; j < seg_masses.size(); ++j) {
        const double target = seg_masses[j];
        StableAccumulator acc;
        while (cur < ordered.size()) {
            const double need = target - acc.value();
            if (need <= 0.0) break;
            auto& s = ordered[cur];
            if (s.w <= need) {
                segments[j].samples.push_back({s.x, s.w});
                acc.add(s.w);
                ++cur;
            } else {
                segments[j].samples.push_back({s.x, need});
                acc.add(need);
                s.w -= need;  // co-located fragment stays for the next segment
                if (s.w <= 0.0) ++cur;
            }
        }
    }
    // rounding slack (<= a few ulp of the total) goes to the last segment
    for (; cur < ordered.size(); ++cur)
        if (!segments.empty())
            segments.back().samples.push_back({ordered[cur].x, ordered[cur].w});
    return segments;
}

double min_pairwise_cell_distance(const std::vector<Cloud>& cells) {
    double best = kInf;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            if (cells[i].empty() || cells[j].empty()) continue;
            best = std::min(best, support_distance(cells[i], cells[j]));
            if (best == 0.0) return 0.0;
        }
    return best;
}

}  // namespace

double support_distance(const Cloud& a, const Cloud& b) {
    if (a.empty() || b.empty()) return kInf;
    double best = kInf;
    for (const auto& u : a.samples)
        for (const auto& v : b.samples) {
            best = std::min(best, dist(u.x, v.x));
            if (best == 0.0) return 0.0;
        }
    return best;
}

double support_distance(const Cloud& a, const Point& p) {
    if (a.empty()) return kInf;
    double best = kInf;
    for (const auto& u : a.samples) best = std::min(best, dist(u.x, p));
    return best;
}

Direction choose_direction(const Cloud& c, const RunConfig& cfg) {
    if (c.empty()) throw DegenerateCloud("choose_direction: empty cloud");
    const int d = static_cast<int>(c.samples.front().x.dim());

    double heaviest = 0.0;
    for (const auto& s : c.samples) heaviest = std::max(heaviest, s.w);

    const auto candidates = direction_candidates(d, cfg);
    double best_tie = kInf;
    std::size_t best = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double tie = max_projection_tie(c, candidates[i]);
        if (tie < best_tie) {
            best_tie = tie;
            best = i;
        }
    }
    if (best_tie > cfg.duplicate_mass_factor * heaviest)
        throw DegenerateCloud(
            "choose_direction: every candidate direction leaves a projection value of mass " +
            std::to_string(best_tie) + " (cloud is effectively atomic)");
    return Direction{candidates[best]};
}

std::vector<Cloud> split_exact(const Cloud& c, std::span<const double> targets,
                               const RunConfig& cfg) {
    const double total = c.mass();
    const double wanted = stable_sum(targets);
    if (std::abs(total - wanted) > 1e-12)
        throw Error("split_exact: targets sum to " + std::to_string(wanted) +
                    " but cloud mass is " + std::to_string(total));
    for (double t : targets)
        if (t < 0.0) throw Error("split_exact: negative target");
    if (targets.empty()) return {};

    const Direction dir = choose_direction(c, cfg);
    return cut_by_mass(order_along(c, dir), targets);
}

GappedSplit split_gapped(const Cloud& c, std::span<const double> targets,
                         const RunConfig& cfg) {
    const double total = c.mass();
    const double wanted = stable_sum(targets);
    if (!(wanted < total - 1e-12))
        throw Error("split_gapped: targets sum to " + std::to_string(wanted) +
                    ", need strictly less than cloud mass " + std::to_string(total));
    for (double t : targets)
        if (t < 0.0) throw Error("split_gapped: negative target");

    GappedSplit out;
    if (targets.empty()) {
        out.remainder = c;
        out.min_cell_distance = kInf;
        return out;
    }

    out.direction = choose_direction(c, cfg);
    auto ordered = order_along(c, out.direction);

    const std::size_t k = targets.size();
    // segment layout along the direction: cell, gap, cell, ..., gap, cell
    // (k == 1 degenerates to cell, tail)
    std::vector<double> seg_masses;
    if (k == 1) {
        seg_masses = {targets[0], total - targets[0]};
    } else {
        const double gap = (total - wanted) / static_cast<double>(k - 1);
        for (std::size_t j = 0; j < k; ++j) {
            seg_masses.push_back(targets[j]);
            if (j + 1 < k) seg_masses.push_back(gap);
        }
    }
    auto segments = cut_by_mass(std::move(ordered), seg_masses);

    for (std::size_t s = 0; s < segments.size(); ++s) {
        const bool is_cell = (k == 1) ? (s == 0) : (s % 2 == 0);
        if (is_cell)
            out.cells.push_back(std::move(segments[s]));
        else
            for (auto& smp : segments[s].samples) out.remainder.samples.push_back(smp);
    }
    out.remainder = merged_by_location(out.remainder);

    for (const auto& cell : out.cells) {
        double last = -kInf;
        for (const auto& s : cell.samples) last = std::max(last, dot(s.x.coords, out.direction.y));
        out.cuts.push_back(last);
    }

    out.min_cell_distance = min_pairwise_cell_distance(out.cells);
    if (out.min_cell_distance <= 0.0)
        throw GapCollapse("split_gapped: two cells touch (projection ties left a zero-width gap)");
    return out;
}

SubordinatePartition subordinate_partition(const Cloud& c, const std::vector<Point>& atoms,
                                           std::span<const double> masses, int N,
                                           const RunConfig& cfg) {
    const std::size_t k = atoms.size();
    if (masses.size() != k)
        throw Error("subordinate_partition: masses/atoms size mismatch");
    if (static_cast<int>(k) > N) throw Error("subordinate_partition: more atoms than slots");

    SubordinatePartition out;
    out.n_slots = N;
    out.pieces.resize(k);

    StableAccumulator req;
    std::size_t ncells = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t slots = static_cast<std::size_t>(N) - 1 - i;
        req.add(static_cast<double>(slots) * masses[i]);
        ncells += slots;
    }
    const double required = req.value();
    const double total = c.mass();
    if (!(total > required))
        throw InsufficientMass("subordinate_partition: cloud mass " + std::to_string(total) +
                               " does not exceed required " + std::to_string(required));

    if (k == 0 || ncells == 0) {
        out.remainder = c;
        out.exclusion_radius = 0.0;
        return out;
    }

    double eps;
    if (k >= 2) {
        eps = kInf;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) eps = std::min(eps, dist(atoms[i], atoms[j]));
        eps *= 0.5;
    } else {
        eps = 1.0;
    }

    // surplus below this leaves some gap thinner than one sample, i.e. with
    // no spatial width; prefer halving further, fall back to the strict
    // minimum only when the margin is unreachable
    double heaviest = 0.0;
    for (const auto& s : c.samples) heaviest = std::max(heaviest, s.w);
    const double margin = 2.0 * heaviest * static_cast<double>(ncells);

    Cloud kept, excluded;
    bool roomy = false;
    for (int rounds = 0; rounds <= 60; ++rounds) {
        kept.samples.clear();
        excluded.samples.clear();
        for (const auto& s : c.samples) {
            double dmin = kInf;
            for (const auto& a : atoms) dmin = std::min(dmin, dist(s.x, a));
            (dmin >= eps ? kept : excluded).samples.push_back(s);
        }
        if (kept.mass() > required + margin) {
            roomy = true;
            break;
        }
        if (rounds < 60) eps *= 0.5;
    }
    if (!roomy && !(kept.mass() > required + 1e-12))
        throw InsufficientMass(
            "subordinate_partition: mass condition unreachable after 60 halvings "
            "(too much cloud mass pinned at atom locations)");

    std::vector<double> flat;
    flat.reserve(ncells);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t h = 0; h + i + 1 < static_cast<std::size_t>(N); ++h)
            flat.push_back(masses[i]);

    auto gs = split_gapped(kept, flat, cfg);

    std::size_t at = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t slots = static_cast<std::size_t>(N) - 1 - i;
        for (std::size_t h = 0; h < slots; ++h) out.pieces[i].push_back(std::move(gs.cells[at++]));
    }

    for (auto& s : excluded.samples) gs.remainder.samples.push_back(s);
    out.remainder = merged_by_location(gs.remainder);
    out.direction = std::move(gs.direction);
    out.cuts = std::move(gs.cuts);
    out.exclusion_radius = eps;

    // every kept sample is >= eps from every atom; a violation here is a bug
    for (std::size_t i = 0; i < k; ++i)
        for (const auto& piece : out.pieces[i])
            for (const auto& a : atoms)
                if (!piece.empty() && support_distance(piece, a) <= 0.0)
                    throw InternalAssertion("subordinate_partition: piece touches an atom");
    return out;
}

}  // namespace mmot
