#include "mmot/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mmot/errors.hpp"
#include "mmot/partition.hpp"

namespace mmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void ledger_check(BuildStats* stats, double actual, double expected, const char* what) {
    if (stats) ++stats->mass_checks;
    const double tol = 1e-12 * std::max(1.0, std::abs(expected));
    if (std::abs(actual - expected) > tol) {
        if (stats) ++stats->mass_violations;
        throw InternalAssertion(std::string("mass ledger: ") + what + ": got " +
                                std::to_string(actual) + ", expected " + std::to_string(expected));
    }
}

void require_sorted(std::span<const double> b, const char* who) {
    for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i] > b[i - 1] + 1e-12)
            throw Error(std::string(who) + ": weights not sorted non-increasing");
}

std::vector<double> suffix_sums(std::span<const double> b) {
    std::vector<double> s(b.size() + 1, 0.0);
    for (std::size_t i = b.size(); i-- > 0;) s[i] = s[i + 1] + b[i];
    return s;
}

}  // namespace

WeightSplit split_for_reduction(std::span<const double> b, int N) {
    const int k = static_cast<int>(b.size());
    if (k < N + 2) throw ConditionViolated("split_for_reduction: need at least N+2 weights");
    require_sorted(b, "split_for_reduction");
    for (double x : b)
        if (!(x > 0.0)) throw Error("split_for_reduction: weights must be positive");

    const auto tail = suffix_sums(b);
    const double lead = static_cast<double>(N - 1) * b[0];
    if (lead > tail[1] + 1e-12)
        throw ConditionViolated("split_for_reduction: (N-1) b_1 exceeds the remaining mass");

    double delta = (tail[1] - lead) / static_cast<double>(N);
    if (delta < 0.0) delta = 0.0;  // equality case: take everything

    // pivot: first index i >= 1 where (N-i+1) b_i <= tail_i; i = N+1 always
    // qualifies, so the scan cannot run off the end
    int pivot = -1;
    for (int i = 1; i < k; ++i) {
        if (static_cast<double>(N - i + 1) * b[i] <= tail[i]) {
            pivot = i;
            break;
        }
    }
    if (pivot < 0) throw InternalAssertion("split_for_reduction: no pivot found");

    WeightSplit out;
    out.reduced.resize(k - 1);
    out.residual.resize(k - 1);
    const double shrink = delta * static_cast<double>(N - pivot + 1) / tail[pivot];
    for (int i = 1; i < k; ++i) {
        double t = (i < pivot) ? b[i] - delta : b[i] - b[i] * shrink;
        if (t < 0.0) {
            if (t < -1e-12) throw InternalAssertion("split_for_reduction: negative part");
            t = 0.0;
        }
        if (t > b[i]) {
            if (t > b[i] + 1e-12) throw InternalAssertion("split_for_reduction: part exceeds weight");
            t = b[i];
        }
        out.reduced[i - 1] = t;
        out.residual[i - 1] = b[i] - t;
    }

    // the four properties the recursion relies on, checked at 1e-12 slack
    const double slack = 1e-12 * std::max(1.0, b[0]);
    if (std::abs(stable_sum(out.reduced) - lead) > slack)
        throw InternalAssertion("split_for_reduction: parts do not sum to (N-1) b_1");
    for (std::size_t i = 1; i < out.reduced.size(); ++i) {
        if (out.reduced[i] > out.reduced[i - 1] + slack)
            throw InternalAssertion("split_for_reduction: reduced part not monotone");
        if (out.residual[i] > out.residual[i - 1] + slack)
            throw InternalAssertion("split_for_reduction: residual part not monotone");
    }
    const double red_rest = stable_sum(std::span(out.reduced).subspan(1));
    if (static_cast<double>(N - 2) * out.reduced[0] > red_rest + slack)
        throw InternalAssertion("split_for_reduction: reduced part fails its inequality");
    const double res_rest = stable_sum(std::span(out.residual).subspan(1));
    if (static_cast<double>(N - 1) * out.residual[0] > res_rest + slack)
        throw InternalAssertion("split_for_reduction: residual part fails its inequality");
    return out;
}

std::vector<double> leave_one_out_weights(std::span<const double> b, int N) {
    if (static_cast<int>(b.size()) != N + 1)
        throw Error("leave_one_out_weights: need exactly N+1 weights");
    require_sorted(b, "leave_one_out_weights");
    const double total = stable_sum(b);
    std::vector<double> a(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] = total / static_cast<double>(N) - b[i];
    // b sorted non-increasing makes a non-decreasing, so a[0] decides
    if (a[0] < -1e-12 * std::max(1.0, total))
        throw NegativeWeight("leave_one_out_weights: (N-1) b_1 > b_2 + ... + b_{N+1} (a_1 = " +
                             std::to_string(a[0]) + ")");
    for (auto& x : a)
        if (x < 0.0) x = 0.0;
    return a;
}

Plan plan_diffuse(const Cloud& c, int N, const RunConfig& cfg, BuildStats* stats) {
    if (c.empty() || !(c.mass() > 0.0)) throw DegenerateCloud("plan_diffuse: empty cloud");
    const int d = static_cast<int>(c.samples.front().x.dim());
    const double total = c.mass();

    Plan out;
    out.arity = N;
    out.d = d;

    if (N == 1) {
        MapBlock mb;
        mb.symmetrized = true;
        for (const auto& s : c.samples) mb.tuples.push_back({{s.x}, s.w});
        out.blocks.push_back(std::move(mb));
        ledger_check(stats, out.mass(), total, "single-slot cloud plan");
        return out;
    }

    // pad the sample count to a multiple of 2N by halving the heaviest
    // sample (rank matching wants aligned cell counts)
    Cloud padded = c;
    const std::size_t n_cells = 2 * static_cast<std::size_t>(N);
    while (padded.size() % n_cells != 0) {
        std::size_t heavy = 0;
        for (std::size_t i = 1; i < padded.size(); ++i) {
            const auto& a = padded.samples[i];
            const auto& h = padded.samples[heavy];
            if (a.w > h.w || (a.w == h.w && lex_less(a.x, h.x))) heavy = i;
        }
        padded.samples[heavy].w *= 0.5;
        padded.samples.push_back(padded.samples[heavy]);
    }

    const std::vector<double> targets(n_cells, total / static_cast<double>(n_cells));
    auto cells = split_exact(padded, targets, cfg);

    // normalized cumulative profile per cell; matching equal mass ranks
    // realizes the measure-preserving cell shift
    std::vector<std::vector<double>> ends(n_cells);
    for (std::size_t j = 0; j < n_cells; ++j) {
        StableAccumulator acc;
        const double cell_mass = cells[j].mass();
        if (!(cell_mass > 0.0)) throw DegenerateCloud("plan_diffuse: empty cell");
        for (const auto& s : cells[j].samples) {
            acc.add(s.w);
            ends[j].push_back(acc.value() / cell_mass);
        }
        ends[j].back() = 1.0;
    }

    MapBlock mb;
    mb.symmetrized = true;
    const double cell_target = total / static_cast<double>(n_cells);
    for (std::size_t start = 0; start < n_cells; ++start) {
        std::vector<std::size_t> orbit(static_cast<std::size_t>(N));
        for (std::size_t i = 0; i < orbit.size(); ++i) orbit[i] = (start + 2 * i) % n_cells;

        std::set<double> cut_set{1.0};
        for (auto cell : orbit)
            for (double e : ends[cell]) cut_set.insert(e);

        double lo = 0.0;
        for (double hi : cut_set) {
            if (!(hi > lo)) continue;
            const double mid = 0.5 * (lo + hi);
            MapTuple t;
            t.w = (hi - lo) * cell_target;
            t.points.reserve(orbit.size());
            for (auto cell : orbit) {
                const auto& e = ends[cell];
                const std::size_t at = static_cast<std::size_t>(
                    std::upper_bound(e.begin(), e.end(), mid) - e.begin());
                t.points.push_back(cells[cell].samples[std::min(at, e.size() - 1)].x);
            }
            mb.tuples.push_back(std::move(t));
            lo = hi;
        }
    }
    out.blocks.push_back(std::move(mb));

    ledger_check(stats, out.mass(), total, "cloud plan mass");
    if (!(min_separation(out) > 0.0))
        throw DegenerateCloud("plan_diffuse: zero separation (an intermediate cell has no "
                              "spatial width; the cloud is too concentrated)");
    return out;
}

Plan plan_few_atoms(const Cloud& c, const AtomList& atoms, int N, const RunConfig& cfg,
                    BuildStats* stats) {
    const std::size_t k = atoms.size();
    if (k == 0) return plan_diffuse(c, N, cfg, stats);
    if (static_cast<int>(k) > N) throw Error("plan_few_atoms: more atoms than slots");
    const auto b = atoms.weights();
    require_sorted(b, "plan_few_atoms");

    const double cloud_mass = c.mass();
    const double need = static_cast<double>(N) * b[0] - stable_sum(b);
    if (!(cloud_mass > need))
        throw InsufficientMass("plan_few_atoms: cloud mass " + std::to_string(cloud_mass) +
                               " does not exceed N b_1 - sum b = " + std::to_string(need));

    // partition masses: b_i - b_{i+1}, last one b_k
    std::vector<double> masses(k);
    for (std::size_t i = 0; i < k; ++i) masses[i] = b[i] - (i + 1 < k ? b[i + 1] : 0.0);

    std::vector<Point> locations;
    locations.reserve(k);
    for (const auto& a : atoms.entries) locations.push_back(a.x);
    auto part = subordinate_partition(c, locations, masses, N, cfg);

    const int d = static_cast<int>(locations.front().dim());
    Plan out;
    out.arity = N;
    out.d = d;
    for (std::size_t i = 0; i < k; ++i) {
        const double m = masses[i];
        if (!(m > 0.0)) continue;  // tied weights contribute no block
        ProductBlock pb;
        pb.symmetrized = true;
        pb.scale = static_cast<double>(N) *
                   std::pow(m, static_cast<double>(i) + 2.0 - static_cast<double>(N));
        for (std::size_t j = 0; j <= i; ++j) pb.factors.push_back(Factor::atom(locations[j], 1.0));
        for (auto& piece : part.pieces[i]) pb.factors.push_back(Factor::diffuse(piece));
        ledger_check(stats, pb.mass(), static_cast<double>(N) * m, "pinned-atom block mass");
        out.blocks.push_back(std::move(pb));
    }

    out = plan_add(std::move(out), plan_diffuse(part.remainder, N, cfg, stats));
    ledger_check(stats, out.mass(), cloud_mass + stable_sum(b), "few-atoms plan mass");
    return out;
}

Plan plan_discrete(const AtomList& atoms, int N, const RunConfig& cfg, BuildStats* stats) {
    const std::size_t k = atoms.size();
    if (k == 0) throw Error("plan_discrete: no atoms");
    const auto b = atoms.weights();
    require_sorted(b, "plan_discrete");
    const int d = static_cast<int>(atoms.entries.front().x.dim());
    const double total = stable_sum(b);

    Plan out;
    out.arity = N;
    out.d = d;

    if (N == 1) {
        ProductBlock pb;
        pb.symmetrized = true;
        pb.factors.push_back(Factor::atomic(atoms));
        out.blocks.push_back(std::move(pb));
        return out;
    }

    const double rest = total - b[0];
    if (static_cast<double>(N - 1) * b[0] > rest + 1e-12 * std::max(1.0, total))
        throw ConditionViolated("plan_discrete: (N-1) b_1 > b_2 + ... + b_k");
    if (static_cast<int>(k) < N) throw InternalAssertion("plan_discrete: arity underflow");

    if (static_cast<int>(k) == N) {
        // the inequality pins every weight to b_1; one uniform block suffices
        if (b[0] - b[k - 1] > 1e-12 * std::max(1.0, b[0]))
            throw InternalAssertion("plan_discrete: k == N with unequal weights");
        ProductBlock pb;
        pb.symmetrized = true;
        pb.scale = total;
        for (const auto& a : atoms.entries) pb.factors.push_back(Factor::atom(a.x, 1.0));
        out.blocks.push_back(std::move(pb));
        ledger_check(stats, out.mass(), total, "uniform block mass");
        return out;
    }

    if (static_cast<int>(k) == N + 1) {
        const auto a = leave_one_out_weights(b, N);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!(a[i] > 0.0)) continue;
            ProductBlock pb;
            pb.symmetrized = true;
            pb.scale = static_cast<double>(N) * a[i];
            for (std::size_t j = 0; j < atoms.size(); ++j)
                if (j != i) pb.factors.push_back(Factor::atom(atoms.entries[j].x, 1.0));
            out.blocks.push_back(std::move(pb));
        }
        ledger_check(stats, out.mass(), total, "leave-one-out plan mass");
        return out;
    }

    // k >= N+2: split the trailing weights and recurse on both parts
    const auto ws = split_for_reduction(b, N);

    AtomList reduced_atoms;
    for (std::size_t i = 1; i < k; ++i)
        if (ws.reduced[i - 1] > 0.0)
            reduced_atoms.entries.push_back({atoms.entries[i].x, ws.reduced[i - 1]});
    Plan q1 = plan_discrete(reduced_atoms, N - 1, cfg, stats);
    Plan q = insert_averaged(q1, Factor::atom(atoms.entries.front().x, 1.0));
    ledger_check(stats, q.mass(), static_cast<double>(N) * b[0], "pinned subplan mass");

    AtomList residual_atoms;
    for (std::size_t i = 1; i < k; ++i)
        if (ws.residual[i - 1] > 0.0)
            residual_atoms.entries.push_back({atoms.entries[i].x, ws.residual[i - 1]});
    if (!residual_atoms.empty())
        q = plan_add(std::move(q), plan_discrete(residual_atoms, N, cfg, stats));

    ledger_check(stats, q.mass(), total, "discrete plan mass");
    return q;
}

Plan plan_with_tail(const Cloud& c, const AtomList& atoms, int N, const RunConfig& cfg,
                    BuildStats* stats) {
    const std::size_t k = atoms.size();
    if (static_cast<int>(k) <= N) throw Error("plan_with_tail: need more atoms than slots");
    const auto b = atoms.weights();
    require_sorted(b, "plan_with_tail");

    const int ell = fast_decreasing_prefix(b, N);
    if (ell == 0) {
        Plan out = plan_discrete(atoms, N, cfg, stats);
        if (c.mass() > 0.0) out = plan_add(std::move(out), plan_diffuse(c, N, cfg, stats));
        return out;
    }

    AtomList tail_atoms;
    for (std::size_t i = ell; i < k; ++i) tail_atoms.entries.push_back(atoms.entries[i]);
    const double tail_mass = tail_atoms.mass();
    const double q_share = tail_mass / static_cast<double>(N - ell);

    Plan p = plan_discrete(tail_atoms, N - ell, cfg, stats);
    for (int j = ell; j >= 1; --j) {
        p = insert_averaged(p, Factor::atom(atoms.entries[j - 1].x, 1.0));
        ledger_check(stats, p.mass(), static_cast<double>(N - j + 1) * q_share,
                     "pinned extension mass");
    }

    AtomList lead;
    for (int i = 0; i < ell; ++i) {
        const double w = b[i] - q_share;
        if (!(w > 0.0))
            throw InternalAssertion("plan_with_tail: reduced leading weight not positive");
        lead.entries.push_back({atoms.entries[i].x, w});
    }
    Plan out = plan_add(std::move(p), plan_few_atoms(c, lead, N, cfg, stats));
    ledger_check(stats, out.mass(), c.mass() + stable_sum(b), "tail plan mass");
    return out;
}

CountableReduction reduce_countable(const Marginal& m, int N, const RunConfig& cfg,
                                    BuildStats* stats) {
    (void)cfg;
    const std::size_t k = m.atoms.size();
    if (static_cast<int>(k) < N + 1) throw Error("reduce_countable: need at least N+1 atoms");
    const auto b = m.atoms.weights();
    require_sorted(b, "reduce_countable");

    CountableReduction red;
    red.budget = 0.5 * std::min(b[N], 1.0 / static_cast<double>(N) - b[0]);
    if (!(red.budget > 0.0))
        throw ConditionViolated("reduce_countable: leading weight is not below 1/N");

    const auto& entries = m.atoms.entries;
    double r_min = kInf;
    for (int i = 0; i <= N; ++i)
        for (int j = i + 1; j <= N; ++j) r_min = std::min(r_min, dist(entries[i].x, entries[j].x));

    // balls around atoms 3..N+1 (1-based); shrink past any atom sitting
    // exactly on a candidate sphere
    for (int center = 2; center <= N; ++center) {
        double t = r_min * (127.0 / 256.0);
        for (int rounds = 0; rounds < 1000; ++rounds) {
            bool on_boundary = false;
            for (std::size_t i = 0; i < k; ++i)
                if (dist(entries[i].x, entries[center].x) == t) {
                    on_boundary = true;
                    break;
                }
            if (!on_boundary) break;
            t *= 1.0 - 0x1.0p-20;
        }
        red.radii.push_back(t);
    }

    // group of each atom: its enclosing ball, else the complement (group 1)
    auto group_of = [&](std::size_t i) -> int {
        for (int center = 2; center <= N; ++center)
            if (dist(entries[i].x, entries[center].x) < red.radii[center - 2]) return center;
        return 1;
    };

    // common peel threshold: smallest n past the first N+1 atoms whose tail
    // mass fits the budget (every atom lies in exactly one group, so the
    // group tails sum to the global tail)
    const auto tail = suffix_sums(b);
    std::size_t n = static_cast<std::size_t>(N) + 1;
    while (n < k && tail[n] >= red.budget) ++n;
    if (tail[n] >= red.budget)
        throw InternalAssertion("reduce_countable: no admissible threshold");
    red.threshold = n;

    std::vector<AtomList> tails(N + 1);  // indexed by group center 1..N
    for (std::size_t i = n; i < k; ++i) tails[group_of(i)].entries.push_back(entries[i]);

    red.tail_masses.assign(N, 0.0);
    const int d = m.d;
    red.prefix.arity = N;
    red.prefix.d = d;
    for (int g = 1; g <= N; ++g) {
        const double eps_g = tails[g].mass();
        red.tail_masses[g - 1] = eps_g;
        if (!(eps_g > 0.0)) continue;
        ProductBlock pb;
        pb.symmetrized = true;
        pb.scale = static_cast<double>(N);
        pb.factors.push_back(Factor::atomic(tails[g]));
        for (int h = 1; h <= N; ++h)
            if (h != g) pb.factors.push_back(Factor::atom(entries[h].x, 1.0));
        red.prefix.blocks.push_back(std::move(pb));
    }

    const double peeled = tail[n];
    red.residual.d = d;
    red.residual.diffuse = m.diffuse;
    for (std::size_t i = 0; i < k; ++i) {
        double w = b[i];
        if (i >= 1 && i <= static_cast<std::size_t>(N))
            w -= peeled - red.tail_masses[group_of(i) - 1];
        else if (i >= n)
            w = 0.0;
        if (w > 0.0) red.residual.atoms.entries.push_back({entries[i].x, w});
    }
    canonicalize(red.residual.atoms);

    ledger_check(stats, red.prefix.mass() + red.residual.mass(), m.mass(),
                 "countable reduction mass");
    return red;
}

Plan construct(const Marginal& m, int N, const RunConfig& cfg, BuildStats* stats) {
    const auto report = validate_marginal(m, N, cfg);
    if (!report.ok())
        throw ValidationFailed("marginal is not constructible:\n" + report.to_string());

    Marginal cur = m;
    canonicalize(cur);

    Plan acc;
    while (static_cast<int>(cur.atoms.size()) > std::max(cfg.k_cutoff, N)) {
        auto red = reduce_countable(cur, N, cfg, stats);
        if (red.residual.atoms.size() >= cur.atoms.size()) break;  // nothing peeled
        acc = plan_add(std::move(acc), red.prefix);
        cur = std::move(red.residual);
    }

    const std::size_t k = cur.atoms.size();
    Plan core;
    if (k == 0) {
        core = plan_diffuse(cur.diffuse, N, cfg, stats);
    } else if (static_cast<int>(k) <= N) {
        core = plan_few_atoms(cur.diffuse, cur.atoms, N, cfg, stats);
    } else {
        const auto b = cur.atoms.weights();
        const double rest = stable_sum(b) - b[0];
        if (static_cast<double>(N - 1) * b[0] <= rest) {
            core = plan_discrete(cur.atoms, N, cfg, stats);
            if (cur.diffuse.mass() > 0.0)
                core = plan_add(std::move(core), plan_diffuse(cur.diffuse, N, cfg, stats));
        } else {
            core = plan_with_tail(cur.diffuse, cur.atoms, N, cfg, stats);
        }
    }
    acc = plan_add(std::move(acc), core);

    const double before = acc.mass();
    acc = symmetrize(std::move(acc));
    ledger_check(stats, acc.mass(), before, "symmetrize mass");
    ledger_check(stats, acc.mass(), m.mass(), "constructed plan mass");
    return acc;
}

}  // namespace mmot
