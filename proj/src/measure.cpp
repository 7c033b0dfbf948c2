#include "mmot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mmot {

double AtomList::mass() const {
    StableAccumulator acc;
    for (const auto& a : entries) acc.add(a.b);
    return acc.value();
}

std::vector<double> AtomList::weights() const {
    std::vector<double> w;
    w.reserve(entries.size());
    for (const auto& a : entries) w.push_back(a.b);
    return w;
}

double Cloud::mass() const {
    StableAccumulator acc;
    for (const auto& s : samples) acc.add(s.w);
    return acc.value();
}

double concentration(const Marginal& m) {
    double mu = 0.0;
    for (const auto& a : m.atoms.entries) mu = std::max(mu, a.b);
    return mu;
}

void canonicalize(AtomList& atoms) {
    auto& e = atoms.entries;
    std::sort(e.begin(), e.end(), [](const Atom& a, const Atom& b) {
        if (a.b != b.b) return a.b > b.b;
        return lex_less(a.x, b.x);
    });
    // merge co-located atoms (may break the weight sort, so merge then re-sort)
    std::map<std::vector<double>, double> by_loc;
    bool merged = false;
    for (const auto& a : e) {
        auto [it, fresh] = by_loc.emplace(a.x.coords, a.b);
        if (!fresh) {
            it->second += a.b;
            merged = true;
        }
    }
    if (merged) {
        e.clear();
        for (const auto& [loc, w] : by_loc) e.push_back({Point{loc}, w});
        std::sort(e.begin(), e.end(), [](const Atom& a, const Atom& b) {
            if (a.b != b.b) return a.b > b.b;
            return lex_less(a.x, b.x);
        });
    }
}

void canonicalize(Marginal& m) {
    canonicalize(m.atoms);
    m.diffuse = merged_by_location(m.diffuse);
}

Cloud merged_by_location(const Cloud& c) {
    std::map<std::vector<double>, double> by_loc;
    for (const auto& s : c.samples) by_loc[s.x.coords] += s.w;
    Cloud out;
    out.samples.reserve(by_loc.size());
    for (const auto& [loc, w] : by_loc) out.samples.push_back({Point{loc}, w});
    return out;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& i : issues) os << i.field << ": " << i.message << "\n";
    return os.str();
}

ValidationReport validate_marginal(const Marginal& m, int N, const RunConfig& cfg) {
    ValidationReport report;
    auto fail = [&](std::string field, std::string msg) {
        report.issues.push_back({std::move(field), std::move(msg)});
    };

    if (N < 1) fail("N", "slot count must be >= 1");
    if (m.d < 1) fail("d", "dimension must be >= 1");

    const auto& atoms = m.atoms.entries;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string field = "atoms[" + std::to_string(i) + "]";
        if (!(atoms[i].b > 0.0) || !std::isfinite(atoms[i].b))
            fail(field + ".b", "weight must be strictly positive and finite");
        if (static_cast<int>(atoms[i].x.dim()) != m.d)
            fail(field + ".x", "location dimension != d");
        for (double c : atoms[i].x.coords)
            if (!std::isfinite(c)) fail(field + ".x", "coordinate not finite");
        if (i > 0 && atoms[i].b > atoms[i - 1].b)
            fail(field + ".b", "weights not sorted non-increasing");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            if (atoms[i].x == atoms[j].x)
                fail("atoms", "duplicate location between atoms " + std::to_string(i) +
                                  " and " + std::to_string(j));

    const double cloud_mass = m.diffuse.mass();
    const double cap = cfg.max_sample_weight_fraction * cloud_mass;
    for (std::size_t i = 0; i < m.diffuse.samples.size(); ++i) {
        const auto& s = m.diffuse.samples[i];
        const std::string field = "diffuse.samples[" + std::to_string(i) + "]";
        if (!(s.w > 0.0) || !std::isfinite(s.w))
            fail(field, "sample weight must be strictly positive and finite");
        if (static_cast<int>(s.x.dim()) != m.d) fail(field, "sample dimension != d");
        if (s.w > cap * (1.0 + 1e-12))
            fail(field, "sample weight exceeds max_sample_weight = |cloud|/" +
                            std::to_string(1.0 / cfg.max_sample_weight_fraction));
    }

    const double total = m.mass();
    if (std::abs(total - 1.0) > 1e-12)
        fail("mass", "total mass is " + std::to_string(total) + ", expected 1");

    const double mu = concentration(m);
    if (N >= 1 && mu >= 1.0 / static_cast<double>(N))
        fail("concentration", "concentration " + std::to_string(mu) +
                                  " is not below 1/N = " + std::to_string(1.0 / N));

    if (!atoms.empty() && !m.diffuse.empty()) {
        for (const auto& s : m.diffuse.samples)
            for (const auto& a : atoms)
                if (s.x == a.x) {
                    report.warnings.push_back("cloud sample coincides with an atom location");
                    goto done_warn;
                }
    done_warn:;
    }
    return report;
}

int fast_decreasing_prefix(std::span<const double> b, int N) {
    const int k = static_cast<int>(b.size());
    // suffix[j] = sum of b[j..k-1], accumulated back to front for stability
    std::vector<double> suffix(k + 1, 0.0);
    for (int j = k - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + b[j];

    int ell = 0;
    for (int j = 1; j <= std::min(N - 1, k - 1); ++j) {
        if (static_cast<double>(N - j) * b[j - 1] > suffix[j])
            ell = j;
        else
            break;
    }
    return ell;
}

}  // namespace mmot
