#include "mmot/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mmot/errors.hpp"

namespace mmot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}
}  // namespace

double Factor::mass() const {
    return std::visit([](const auto& m) { return m.mass(); }, measure);
}

std::size_t Factor::support_size() const {
    if (is_atomic()) return std::get<AtomList>(measure).size();
    return std::get<Cloud>(measure).size();
}

int Factor::dim() const {
    if (is_atomic()) {
        const auto& a = std::get<AtomList>(measure);
        return a.empty() ? 0 : static_cast<int>(a.entries.front().x.dim());
    }
    const auto& c = std::get<Cloud>(measure);
    return c.empty() ? 0 : static_cast<int>(c.samples.front().x.dim());
}

void Factor::for_each(const std::function<void(const Point&, double)>& fn) const {
    if (is_atomic())
        for (const auto& a : std::get<AtomList>(measure).entries) fn(a.x, a.b);
    else
        for (const auto& s : std::get<Cloud>(measure).samples) fn(s.x, s.w);
}

double ProductBlock::mass() const {
    double m = scale;
    for (const auto& f : factors) m *= f.mass();
    return m;
}

double MapBlock::mass() const {
    StableAccumulator acc;
    for (const auto& t : tuples) acc.add(t.w);
    return acc.value();
}

double block_mass(const Block& b) {
    return std::visit([](const auto& blk) { return blk.mass(); }, b);
}

double Plan::mass() const {
    StableAccumulator acc;
    for (const auto& b : blocks) acc.add(block_mass(b));
    return acc.value();
}

bool Plan::all_symmetrized() const {
    for (const auto& b : blocks)
        if (!std::visit([](const auto& blk) { return blk.symmetrized; }, b)) return false;
    return true;
}

Plan tensor_insert(const Plan& p, int slot, const Factor& f) {
    if (slot < 1 || slot > p.arity + 1)
        throw ArityMismatch("tensor_insert: slot " + std::to_string(slot) +
                            " out of range for arity " + std::to_string(p.arity));
    Plan out;
    out.arity = p.arity + 1;
    out.d = p.d;
    out.blocks.reserve(p.blocks.size());
    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b)) {
            ProductBlock pb = std::get<ProductBlock>(b);
            if (pb.symmetrized)
                throw InsertIntoSymmetrized("tensor_insert: block already symmetrized");
            pb.factors.insert(pb.factors.begin() + (slot - 1), f);
            out.blocks.push_back(std::move(pb));
        } else {
            const MapBlock& mb = std::get<MapBlock>(b);
            if (mb.symmetrized)
                throw InsertIntoSymmetrized("tensor_insert: block already symmetrized");
            if (!f.is_atomic())
                throw DiffuseIntoMapBlock("tensor_insert: diffuse factor into a map block");
            const auto& atoms = std::get<AtomList>(f.measure).entries;
            MapBlock nb;
            nb.symmetrized = false;
            nb.tuples.reserve(mb.tuples.size() * atoms.size());
            for (const auto& t : mb.tuples)
                for (const auto& a : atoms) {
                    MapTuple nt = t;
                    nt.points.insert(nt.points.begin() + (slot - 1), a.x);
                    nt.w = t.w * a.b;
                    nb.tuples.push_back(std::move(nt));
                }
            out.blocks.push_back(std::move(nb));
        }
    }
    return out;
}

Plan symmetrize(Plan p) {
    for (auto& b : p.blocks)
        std::visit([](auto& blk) { blk.symmetrized = true; }, b);
    return p;
}

Plan insert_averaged(const Plan& p, const Factor& f) {
    if (!p.all_symmetrized())
        throw UnsymmetrizedPlan("insert_averaged: input plan must be symmetrized");
    const int n = p.arity;
    if (n < 1) throw ArityMismatch("insert_averaged: empty arity");
    const double rescale = static_cast<double>(n + 1) / static_cast<double>(n);

    Plan out;
    out.arity = n + 1;
    out.d = p.d;
    out.blocks.reserve(p.blocks.size());
    for (const auto& b : p.blocks) {
        // run the single-slot insert on an unsymmetrized copy, then restore
        // the flag with the (n+1)/n rescale
        Plan one;
        one.arity = n;
        one.d = p.d;
        one.blocks.push_back(b);
        std::visit([](auto& blk) { blk.symmetrized = false; }, one.blocks.front());
        Plan ins = tensor_insert(one, 1, f);
        for (auto& nb : ins.blocks) {
            if (std::holds_alternative<ProductBlock>(nb)) {
                auto& pb = std::get<ProductBlock>(nb);
                pb.scale *= rescale;
                pb.symmetrized = true;
            } else {
                auto& mb = std::get<MapBlock>(nb);
                for (auto& t : mb.tuples) t.w *= rescale;
                mb.symmetrized = true;
            }
            out.blocks.push_back(std::move(nb));
        }
    }
    return out;
}

namespace {

void accumulate_measure(Marginal& acc, const Factor& f, double coef) {
    if (coef == 0.0) return;
    if (f.is_atomic())
        for (const auto& a : std::get<AtomList>(f.measure).entries)
            acc.atoms.entries.push_back({a.x, coef * a.b});
    else
        for (const auto& s : std::get<Cloud>(f.measure).samples)
            acc.diffuse.samples.push_back({s.x, coef * s.w});
}

}  // namespace

Marginal plan_marginal(const Plan& p) {
    Marginal acc;
    acc.d = p.d;
    const double inv_n = 1.0 / static_cast<double>(p.arity);

    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b)) {
            const auto& pb = std::get<ProductBlock>(b);
            if (!pb.symmetrized && p.arity != 1)
                throw UnsymmetrizedPlan("plan_marginal: block not symmetrized");
            const std::size_t n = pb.factors.size();
            std::vector<double> masses(n);
            for (std::size_t i = 0; i < n; ++i) masses[i] = pb.factors[i].mass();
            for (std::size_t j = 0; j < n; ++j) {
                double others = pb.scale;
                for (std::size_t i = 0; i < n; ++i)
                    if (i != j) others *= masses[i];
                accumulate_measure(acc, pb.factors[j], others * inv_n);
            }
        } else {
            const auto& mb = std::get<MapBlock>(b);
            if (!mb.symmetrized && p.arity != 1)
                throw UnsymmetrizedPlan("plan_marginal: map block not symmetrized");
            for (const auto& t : mb.tuples)
                for (const auto& x : t.points)
                    acc.diffuse.samples.push_back({x, t.w * inv_n});
        }
    }
    canonicalize(acc);
    return acc;
}

namespace {

double factor_pair_separation(const Factor& a, const Factor& b) {
    double best = kInf;
    a.for_each([&](const Point& u, double) {
        if (best == 0.0) return;
        b.for_each([&](const Point& v, double) {
            if (best == 0.0) return;
            best = std::min(best, dist(u, v));
        });
    });
    return best;
}

}  // namespace

double min_separation(const Plan& p) {
    double best = kInf;
    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b)) {
            const auto& pb = std::get<ProductBlock>(b);
            for (std::size_t i = 0; i < pb.factors.size() && best > 0.0; ++i)
                for (std::size_t j = i + 1; j < pb.factors.size() && best > 0.0; ++j)
                    best = std::min(best, factor_pair_separation(pb.factors[i], pb.factors[j]));
        } else {
            const auto& mb = std::get<MapBlock>(b);
            for (const auto& t : mb.tuples)
                for (std::size_t i = 0; i < t.points.size() && best > 0.0; ++i)
                    for (std::size_t j = i + 1; j < t.points.size() && best > 0.0; ++j)
                        best = std::min(best, dist(t.points[i], t.points[j]));
        }
        if (best == 0.0) return 0.0;
    }
    return best;
}

namespace {

using TupleKey = std::vector<double>;

TupleKey key_of(const std::vector<const Point*>& pts) {
    TupleKey k;
    for (const auto* p : pts)
        for (double c : p->coords) k.push_back(c);
    return k;
}

void expand_product(const ProductBlock& pb, std::map<TupleKey, double>& out) {
    const std::size_t n = pb.factors.size();
    std::vector<std::vector<std::pair<const Point*, double>>> supports(n);
    for (std::size_t i = 0; i < n; ++i)
        pb.factors[i].for_each([&](const Point& x, double w) { supports[i].push_back({&x, w}); });
    for (const auto& s : supports)
        if (s.empty()) return;  // zero-mass block

    std::vector<std::size_t> idx(n, 0);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const double perm_scale = pb.symmetrized ? 1.0 / factorial(static_cast<int>(n)) : 1.0;

    for (;;) {
        double w = pb.scale * perm_scale;
        std::vector<const Point*> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = supports[i][idx[i]].first;
            w *= supports[i][idx[i]].second;
        }
        if (pb.symmetrized) {
            std::vector<int> pm = perm;
            do {
                std::vector<const Point*> arranged(n);
                for (std::size_t i = 0; i < n; ++i) arranged[i] = pts[pm[i]];
                out[key_of(arranged)] += w;
            } while (std::next_permutation(pm.begin(), pm.end()));
        } else {
            out[key_of(pts)] += w;
        }
        std::size_t carry = 0;
        while (carry < n && ++idx[carry] == supports[carry].size()) idx[carry++] = 0;
        if (carry == n) break;
    }
}

void expand_map(const MapBlock& mb, std::map<TupleKey, double>& out) {
    for (const auto& t : mb.tuples) {
        const std::size_t n = t.points.size();
        if (mb.symmetrized) {
            const double w = t.w / factorial(static_cast<int>(n));
            std::vector<int> pm(n);
            std::iota(pm.begin(), pm.end(), 0);
            do {
                std::vector<const Point*> arranged(n);
                for (std::size_t i = 0; i < n; ++i) arranged[i] = &t.points[pm[i]];
                out[key_of(arranged)] += w;
            } while (std::next_permutation(pm.begin(), pm.end()));
        } else {
            std::vector<const Point*> pts(n);
            for (std::size_t i = 0; i < n; ++i) pts[i] = &t.points[i];
            out[key_of(pts)] += t.w;
        }
    }
}

}  // namespace

std::vector<WeightedTuple> dense_expand(const Plan& p, std::size_t cap) {
    double count = 0.0;
    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b)) {
            const auto& pb = std::get<ProductBlock>(b);
            double c = 1.0;
            for (const auto& f : pb.factors) c *= static_cast<double>(f.support_size());
            if (pb.symmetrized) c *= factorial(static_cast<int>(pb.factors.size()));
            count += c;
        } else {
            const auto& mb = std::get<MapBlock>(b);
            double c = static_cast<double>(mb.tuples.size());
            if (mb.symmetrized) c *= factorial(p.arity);
            count += c;
        }
    }
    if (count > static_cast<double>(cap))
        throw ExpansionTooLarge("dense_expand: full expansion has " + std::to_string(count) +
                                " tuples, cap is " + std::to_string(cap));

    std::map<TupleKey, double> merged;
    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b))
            expand_product(std::get<ProductBlock>(b), merged);
        else
            expand_map(std::get<MapBlock>(b), merged);
    }

    const std::size_t d = static_cast<std::size_t>(p.d);
    std::vector<WeightedTuple> out;
    out.reserve(merged.size());
    for (const auto& [key, w] : merged) {
        WeightedTuple t;
        t.w = w;
        for (std::size_t i = 0; i + d <= key.size(); i += d)
            t.points.emplace_back(std::vector<double>(key.begin() + i, key.begin() + i + d));
        out.push_back(std::move(t));
    }
    return out;
}

Plan plan_add(Plan p, const Plan& q) {
    if (p.blocks.empty() && p.arity == 0) {
        // adding to a default-constructed accumulator adopts q's shape
        p.arity = q.arity;
        p.d = q.d;
    }
    if (q.blocks.empty() && q.arity == 0) return p;
    if (p.arity != q.arity || p.d != q.d)
        throw ArityMismatch("plan_add: mismatched arity or dimension");
    p.blocks.insert(p.blocks.end(), q.blocks.begin(), q.blocks.end());
    return p;
}

Plan plan_scale(Plan p, double s) {
    if (!(s > 0.0)) throw Error("plan_scale: scale must be positive");
    for (auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b))
            std::get<ProductBlock>(b).scale *= s;
        else
            for (auto& t : std::get<MapBlock>(b).tuples) t.w *= s;
    }
    return p;
}

}  // namespace mmot
