#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mmot/measure.hpp"
#include "mmot/plan.hpp"
#include "mmot/rng.hpp"

namespace mmot::test {

/// M equal-weight samples at (2i-1)/(2M) on [0,1], total the given mass.
inline Cloud line_cloud(std::size_t m, double mass = 1.0) {
    Cloud c;
    for (std::size_t i = 1; i <= m; ++i)
        c.samples.push_back({Point{(2.0 * static_cast<double>(i) - 1.0) / (2.0 * static_cast<double>(m))},
                             mass / static_cast<double>(m)});
    return c;
}

inline AtomList make_atoms(const std::vector<std::pair<std::vector<double>, double>>& entries) {
    AtomList a;
    for (const auto& [x, b] : entries) a.entries.push_back({Point{x}, b});
    return a;
}

/// Re-summation oracle: total mass per exact location.
inline std::map<std::vector<double>, double> location_masses(const Cloud& c) {
    std::map<std::vector<double>, double> out;
    for (const auto& s : c.samples) out[s.x.coords] += s.w;
    return out;
}

inline std::map<std::vector<double>, double> location_masses(const AtomList& a) {
    std::map<std::vector<double>, double> out;
    for (const auto& e : a.entries) out[e.x.coords] += e.b;
    return out;
}

inline double max_location_residual(const std::map<std::vector<double>, double>& a,
                                    const std::map<std::vector<double>, double>& b) {
    double worst = 0.0;
    for (const auto& [loc, w] : a) {
        auto it = b.find(loc);
        worst = std::max(worst, std::abs(w - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [loc, w] : b)
        if (!a.count(loc)) worst = std::max(worst, std::abs(w));
    return worst;
}

/// Measure-equality of two marginals after per-location re-summation,
/// atoms and cloud compared separately.
inline double marginal_residual(const Marginal& a, const Marginal& b) {
    return std::max(max_location_residual(location_masses(a.atoms), location_masses(b.atoms)),
                    max_location_residual(location_masses(a.diffuse), location_masses(b.diffuse)));
}

/// Sorted positive weights summing to total, with the largest at most
/// max_first (drawn until satisfied).
inline std::vector<double> random_sorted_weights(Rng& rng, int k, double total,
                                                 double max_first) {
    for (;;) {
        std::vector<double> w(k);
        double sum = 0.0;
        for (auto& x : w) {
            x = rng.uniform(0.05, 1.0);
            sum += x;
        }
        for (auto& x : w) x *= total / sum;
        std::sort(w.begin(), w.end(), std::greater<>());
        if (w.front() < max_first) return w;
    }
}

/// k distinct atom locations on a jittered grid in [0, 2]^d.
inline std::vector<Point> random_locations(Rng& rng, int k, int d) {
    std::vector<Point> pts;
    const int side = static_cast<int>(std::ceil(std::pow(static_cast<double>(k), 1.0 / d)));
    std::vector<int> cells(static_cast<std::size_t>(std::pow(side, d)));
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
    for (int i = 0; i < k; ++i) {
        const std::size_t pick = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(cells.size() - i));
        std::swap(cells[pick], cells[cells.size() - 1 - i]);
        int cell = cells[cells.size() - 1 - i];
        std::vector<double> x(d);
        for (int a = 0; a < d; ++a) {
            const int coord = cell % side;
            cell /= side;
            x[a] = (coord + 0.2 + 0.6 * rng.uniform01()) * 2.0 / side;
        }
        pts.push_back(Point{std::move(x)});
    }
    return pts;
}

/// Cloud of m samples uniform in [0,1]^d with equal weights.
inline Cloud random_cloud(Rng& rng, std::size_t m, int d, double mass) {
    Cloud c;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = rng.uniform01();
        c.samples.push_back({Point{std::move(x)}, mass / static_cast<double>(m)});
    }
    return c;
}

/// Random small plan mixing product and map blocks; symmetrized flags off.
inline Plan random_small_plan(Rng& rng, int n, int d) {
    Plan p;
    p.arity = n;
    p.d = d;
    const int n_blocks = 1 + static_cast<int>(rng.uniform01() * 2.0);
    for (int b = 0; b < n_blocks; ++b) {
        if (rng.uniform01() < 0.6) {
            ProductBlock pb;
            pb.scale = rng.uniform(0.2, 1.5);
            for (int i = 0; i < n; ++i) {
                if (rng.uniform01() < 0.5) {
                    AtomList a;
                    const int na = 1 + static_cast<int>(rng.uniform01() * 2.0);
                    for (int j = 0; j < na; ++j) {
                        std::vector<double> x(d);
                        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
                        a.entries.push_back({Point{std::move(x)}, rng.uniform(0.1, 0.9)});
                    }
                    canonicalize(a);
                    pb.factors.push_back(Factor::atomic(std::move(a)));
                } else {
                    Cloud c;
                    const int ns = 2 + static_cast<int>(rng.uniform01() * 2.0);
                    for (int j = 0; j < ns; ++j) {
                        std::vector<double> x(d);
                        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
                        c.samples.push_back({Point{std::move(x)}, rng.uniform(0.1, 0.5)});
                    }
                    pb.factors.push_back(Factor::diffuse(std::move(c)));
                }
            }
            p.blocks.push_back(std::move(pb));
        } else {
            MapBlock mb;
            const int nt = 2 + static_cast<int>(rng.uniform01() * 3.0);
            for (int t = 0; t < nt; ++t) {
                MapTuple tup;
                for (int i = 0; i < n; ++i) {
                    std::vector<double> x(d);
                    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
                    tup.points.push_back(Point{std::move(x)});
                }
                tup.w = rng.uniform(0.1, 0.8);
                mb.tuples.push_back(std::move(tup));
            }
            p.blocks.push_back(std::move(mb));
        }
    }
    return p;
}

}  // namespace mmot::test
