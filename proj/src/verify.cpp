#include "mmot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mmot/errors.hpp"
#include "simplex.hpp"

namespace mmot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using LocationMass = std::map<std::vector<double>, double>;

LocationMass atoms_by_location(const AtomList& a) {
    LocationMass out;
    for (const auto& e : a.entries) out[e.x.coords] += e.b;
    return out;
}

LocationMass cloud_by_location(const Cloud& c) {
    LocationMass out;
    for (const auto& s : c.samples) out[s.x.coords] += s.w;
    return out;
}

/// max residual over common locations / total mass at one-sided locations
std::pair<double, double> compare(const LocationMass& want, const LocationMass& got) {
    double max_res = 0.0, unmatched = 0.0;
    for (const auto& [loc, w] : want) {
        auto it = got.find(loc);
        if (it == got.end())
            unmatched += std::abs(w);
        else
            max_res = std::max(max_res, std::abs(w - it->second));
    }
    for (const auto& [loc, w] : got)
        if (!want.count(loc)) unmatched += std::abs(w);
    return {max_res, unmatched};
}

}  // namespace

bool MarginalReport::pass(double atom_tol, double cloud_tol) const {
    return max_atom_residual <= atom_tol && unmatched_atom_mass <= atom_tol &&
           max_cloud_residual <= cloud_tol && unmatched_cloud_mass <= cloud_tol &&
           mass_residual <= atom_tol + cloud_tol &&
           (!dense_checked || max_dense_residual <= atom_tol + cloud_tol);
}

MarginalReport check_marginals(const Plan& p, const Marginal& m, const RunConfig& cfg) {
    MarginalReport rep;
    const Marginal got = plan_marginal(p);

    auto [ar, au] = compare(atoms_by_location(m.atoms), atoms_by_location(got.atoms));
    rep.max_atom_residual = ar;
    rep.unmatched_atom_mass = au;
    auto [cr, cu] = compare(cloud_by_location(m.diffuse), cloud_by_location(got.diffuse));
    rep.max_cloud_residual = cr;
    rep.unmatched_cloud_mass = cu;
    rep.mass_residual = std::abs(got.mass() - m.mass());

    // independent path: per-axis empirical marginals of the dense expansion
    try {
        const auto tuples = dense_expand(p, cfg.expand_cap);
        LocationMass block_path;
        for (const auto& [loc, w] : atoms_by_location(got.atoms)) block_path[loc] += w;
        for (const auto& [loc, w] : cloud_by_location(got.diffuse)) block_path[loc] += w;

        const double inv_n = 1.0 / static_cast<double>(p.arity);
        LocationMass dense_path;
        for (const auto& t : tuples)
            for (const auto& x : t.points) dense_path[x.coords] += t.w * inv_n;

        auto [dr, du] = compare(block_path, dense_path);
        rep.dense_checked = true;
        rep.max_dense_residual = std::max(dr, du);
    } catch (const ExpansionTooLarge&) {
        rep.dense_checked = false;
    }
    return rep;
}

bool check_symmetry(const Plan& p, const RunConfig& cfg) {
    if (!p.all_symmetrized()) return false;
    if (p.arity == 1) return true;

    std::vector<WeightedTuple> tuples;
    try {
        tuples = dense_expand(p, cfg.expand_cap);
    } catch (const ExpansionTooLarge&) {
        return true;  // flags alone; expansion too large to probe
    }

    std::map<std::vector<double>, double> base;
    for (const auto& t : tuples) {
        std::vector<double> key;
        for (const auto& pt : t.points)
            key.insert(key.end(), pt.coords.begin(), pt.coords.end());
        base[key] += t.w;
    }
    // adjacent transpositions generate the permutation group
    for (int s = 0; s + 1 < p.arity; ++s) {
        for (const auto& t : tuples) {
            auto pts = t.points;
            std::swap(pts[s], pts[s + 1]);
            std::vector<double> key;
            for (const auto& pt : pts) key.insert(key.end(), pt.coords.begin(), pt.coords.end());
            auto it = base.find(key);
            if (it == base.end() || std::abs(it->second - t.w) > 1e-12) return false;
        }
    }
    return true;
}

double exact_optimum_tiny(const AtomList& atoms, int N, const OmegaSpec& w,
                          const RunConfig& cfg) {
    (void)cfg;
    const std::size_t k = atoms.size();
    if (k == 0) throw Error("exact_optimum_tiny: no atoms");
    double grid = 1.0;
    for (int i = 0; i < N; ++i) {
        grid *= static_cast<double>(k);
        if (grid > 1e4) throw SizeCap("exact_optimum_tiny: k^N exceeds 1e4");
    }

    // variables: tuples with pairwise distinct atom indices (repeats carry
    // infinite cost and cannot appear in any finite-cost plan)
    std::vector<std::vector<int>> tuples;
    std::vector<int> t(N, 0);
    for (;;) {
        bool distinct = true;
        for (int i = 0; i < N && distinct; ++i)
            for (int j = i + 1; j < N; ++j)
                if (t[i] == t[j]) {
                    distinct = false;
                    break;
                }
        if (distinct) tuples.push_back(t);
        int carry = 0;
        while (carry < N && ++t[carry] == static_cast<int>(k)) t[carry++] = 0;
        if (carry == N) break;
    }
    if (tuples.empty()) return kInf;

    std::vector<double> cost(tuples.size(), 0.0);
    for (std::size_t v = 0; v < tuples.size(); ++v)
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                cost[v] += pair_potential(
                    w, dist(atoms.entries[tuples[v][i]].x, atoms.entries[tuples[v][j]].x));

    // N*k marginal rows: sum over tuples with slot s at atom a equals b_a
    const std::size_t rows = static_cast<std::size_t>(N) * k;
    std::vector<std::vector<double>> A(rows, std::vector<double>(tuples.size(), 0.0));
    std::vector<double> rhs(rows, 0.0);
    for (int s = 0; s < N; ++s)
        for (std::size_t a = 0; a < k; ++a) rhs[s * k + a] = atoms.entries[a].b;
    for (std::size_t v = 0; v < tuples.size(); ++v)
        for (int s = 0; s < N; ++s) A[s * k + tuples[v][s]][v] += 1.0;

    const auto res = detail::solve_equality_lp(A, rhs, cost);
    if (!res.feasible) return kInf;
    return res.value;
}

Certificate certify(const Plan& p, const Marginal& m, int N, const OmegaSpec& w,
                    const RunConfig& cfg, const BuildStats* stats) {
    Certificate cert;
    cert.arity = p.arity;
    cert.seed = cfg.seed;
    cert.config_digest = config_hash(cfg);
    cert.config = cfg;
    cert.marginal = check_marginals(p, m, cfg);
    cert.symmetry_ok = check_symmetry(p, cfg);
    cert.separation = min_separation(p);
    cert.cost = plan_cost(p, w, cfg);
    if (stats) {
        cert.ledger_checks = stats->mass_checks;
        cert.ledger_violations = stats->mass_violations;
    }

    // blockwise generalization of the map-plan bound: total cost is at most
    // |p| * C(N,2) / omega(separation)
    if (cert.separation > 0.0 && std::isfinite(cert.cost)) {
        const double pairs = 0.5 * static_cast<double>(N) * static_cast<double>(N - 1);
        const double bound = p.mass() * pairs * pair_potential(w, cert.separation);
        cert.cost_within_separation_bound = cert.cost <= bound * (1.0 + 1e-9);
    }

    cert.pass = cert.marginal.pass(cfg.atom_tol, cfg.cloud_tol) && cert.symmetry_ok &&
                cert.separation > 0.0 && std::isfinite(cert.cost) &&
                cert.cost_within_separation_bound && cert.ledger_violations == 0 &&
                (p.arity == N);
    return cert;
}

}  // namespace mmot
