#include "mmot/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmot/errors.hpp"
#include "mmot/rng.hpp"

namespace mmot {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
}  // namespace

OmegaSpec OmegaSpec::identity() {
    OmegaSpec w;
    w.kind_ = Kind::Identity;
    return w;
}

OmegaSpec OmegaSpec::power(double s) {
    if (!(s > 0.0)) throw Error("omega: power exponent must be > 0");
    OmegaSpec w;
    w.kind_ = Kind::Power;
    w.s_ = s;
    return w;
}

OmegaSpec OmegaSpec::table(std::vector<double> r, std::vector<double> w) {
    if (r.size() != w.size() || r.size() < 2)
        throw Error("omega table: need matching r/w lists with >= 2 nodes");
    if (r.front() != 0.0 || w.front() != 0.0)
        throw Error("omega table: first node must be (0, 0)");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1]) || !(w[i] > w[i - 1]))
            throw Error("omega table: nodes must be strictly increasing in r and w");
    OmegaSpec spec;
    spec.kind_ = Kind::Table;
    spec.r_ = std::move(r);
    spec.w_ = std::move(w);
    return spec;
}

double OmegaSpec::omega(double r) const {
    switch (kind_) {
        case Kind::Identity:
            return r;
        case Kind::Power:
            return std::pow(r, s_);
        case Kind::Table: {
            if (r <= 0.0) return 0.0;
            auto it = std::upper_bound(r_.begin(), r_.end(), r);
            std::size_t hi = it == r_.end() ? r_.size() - 1 : static_cast<std::size_t>(it - r_.begin());
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            const double t = (r - r_[lo]) / (r_[hi] - r_[lo]);
            return w_[lo] + t * (w_[hi] - w_[lo]);
        }
    }
    return r;
}

double OmegaSpec::omega_prime(double r) const {
    switch (kind_) {
        case Kind::Identity:
            return 1.0;
        case Kind::Power:
            return s_ * std::pow(r, s_ - 1.0);
        case Kind::Table: {
            auto it = std::upper_bound(r_.begin(), r_.end(), r);
            std::size_t hi = it == r_.end() ? r_.size() - 1 : static_cast<std::size_t>(it - r_.begin());
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            return (w_[hi] - w_[lo]) / (r_[hi] - r_[lo]);
        }
    }
    return 1.0;
}

double OmegaSpec::omega_inverse(double u) const {
    if (u < 0.0) throw Error("omega_inverse: negative value");
    switch (kind_) {
        case Kind::Identity:
            return u;
        case Kind::Power:
            return std::pow(u, 1.0 / s_);
        case Kind::Table: {
            if (u <= 0.0) return 0.0;
            auto it = std::upper_bound(w_.begin(), w_.end(), u);
            std::size_t hi = it == w_.end() ? w_.size() - 1 : static_cast<std::size_t>(it - w_.begin());
            if (hi == 0) hi = 1;
            const std::size_t lo = hi - 1;
            // exact segment solve; past the last node continue with its slope
            const double t = (u - w_[lo]) / (w_[hi] - w_[lo]);
            return r_[lo] + t * (r_[hi] - r_[lo]);
        }
    }
    return u;
}

double pair_potential(const OmegaSpec& w, double r) {
    if (r < 0.0) throw Error("pair_potential: negative distance");
    const double o = w.omega(r);
    if (o <= 0.0) return kInf;
    return 1.0 / o;
}

namespace {

struct SupportPoint {
    Point x;
    double w;
};

/// Factor support for pair sums, stratified down to at most cap equal-mass
/// representative samples (canonical order, mass-midpoint representative).
std::vector<SupportPoint> cost_support(const Factor& f, std::size_t cap) {
    if (cap == 0) cap = 1;
    std::vector<SupportPoint> pts;
    f.for_each([&](const Point& x, double w) { pts.push_back({x, w}); });
    if (pts.size() <= cap) return pts;

    std::sort(pts.begin(), pts.end(), [](const SupportPoint& a, const SupportPoint& b) {
        return lex_less(a.x, b.x);
    });
    const double total = [&] {
        StableAccumulator acc;
        for (const auto& p : pts) acc.add(p.w);
        return acc.value();
    }();

    std::vector<SupportPoint> out;
    out.reserve(cap);
    std::size_t cur = 0;
    double consumed = 0.0;
    for (std::size_t s = 0; s < cap; ++s) {
        const double stratum = total / static_cast<double>(cap);
        const double mid = (static_cast<double>(s) + 0.5) * stratum;
        while (cur + 1 < pts.size() && consumed + pts[cur].w < mid) consumed += pts[cur++].w;
        out.push_back({pts[cur].x, stratum});
    }
    return out;
}

double product_block_cost(const ProductBlock& pb, const OmegaSpec& w, std::size_t cap) {
    const std::size_t n = pb.factors.size();
    std::vector<double> masses(n);
    for (std::size_t i = 0; i < n; ++i) masses[i] = pb.factors[i].mass();

    std::vector<std::vector<SupportPoint>> sup(n);
    for (std::size_t i = 0; i < n; ++i) sup[i] = cost_support(pb.factors[i], cap);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double coef = pb.scale;
            for (std::size_t l = 0; l < n; ++l)
                if (l != i && l != j) coef *= masses[l];
            if (coef == 0.0) continue;
            StableAccumulator pair_sum;
            for (const auto& u : sup[i])
                for (const auto& v : sup[j]) {
                    const double pot = pair_potential(w, dist(u.x, v.x));
                    if (pot == kInf) return kInf;
                    pair_sum.add(u.w * v.w * pot);
                }
            total += coef * pair_sum.value();
        }
    return total;
}

bool block_is_subsampled(const ProductBlock& pb, std::size_t cap) {
    for (const auto& f : pb.factors)
        if (f.support_size() > cap) return true;
    return false;
}

double map_block_cost(const MapBlock& mb, const OmegaSpec& w) {
    StableAccumulator acc;
    for (const auto& t : mb.tuples) {
        double pair_sum = 0.0;
        for (std::size_t i = 0; i < t.points.size(); ++i)
            for (std::size_t j = i + 1; j < t.points.size(); ++j) {
                const double pot = pair_potential(w, dist(t.points[i], t.points[j]));
                if (pot == kInf) return kInf;
                pair_sum += pot;
            }
        acc.add(t.w * pair_sum);
    }
    return acc.value();
}

}  // namespace

double plan_cost(const Plan& p, const OmegaSpec& w, const RunConfig& cfg,
                 double* subsample_error) {
    if (subsample_error) *subsample_error = 0.0;
    StableAccumulator acc;
    for (const auto& b : p.blocks) {
        double c;
        if (std::holds_alternative<ProductBlock>(b)) {
            const auto& pb = std::get<ProductBlock>(b);
            c = product_block_cost(pb, w, cfg.cost_pair_cap);
            if (subsample_error && c != kInf && block_is_subsampled(pb, cfg.cost_pair_cap)) {
                const double coarse = product_block_cost(pb, w, cfg.cost_pair_cap / 2);
                if (coarse != kInf) *subsample_error += std::abs(c - coarse);
            }
        } else {
            c = map_block_cost(std::get<MapBlock>(b), w);
        }
        if (c == kInf) return kInf;
        acc.add(c);
    }
    return acc.value();
}

double unit_ball_volume(int d) {
    // alpha_d = pi^(d/2) / Gamma(d/2 + 1)
    return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

SharpnessConstants sharpness_constants(const OmegaSpec& w, int d) {
    SharpnessConstants c;
    c.alpha_d = unit_ball_volume(d);
    c.kconst = c.alpha_d * w.omega(1.0);
    if (!(c.kconst > 0.0)) throw Error("sharpness_constants: omega(1) must be positive");
    return c;
}

Marginal sharpness_marginal(const OmegaSpec& w, int d, int N, std::size_t M,
                            std::uint64_t seed) {
    if (d < 1 || N < 1 || M < 1) throw Error("sharpness_marginal: d, N, M must be >= 1");
    Marginal m;
    m.d = d;
    m.atoms.entries.push_back({Point{std::vector<double>(d, 0.0)}, 1.0 / static_cast<double>(N)});

    const double omega1 = w.omega(1.0);
    const double weight = (static_cast<double>(N) - 1.0) / static_cast<double>(N) /
                          static_cast<double>(M);
    Rng rng(seed);
    m.diffuse.samples.reserve(M);
    for (std::size_t i = 0; i < M; ++i) {
        // stratified radial uniform: the empirical radial CDF tracks
        // omega(r)/omega(1) to O(1/M) instead of O(1/sqrt(M))
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(M);
        const double r = w.omega_inverse(u * omega1);
        auto dir = rng.unit_vector(d);
        for (auto& c : dir) c *= r;
        m.diffuse.samples.push_back({Point{std::move(dir)}, weight});
    }
    return m;
}

double sharpness_lower_bound(const OmegaSpec& w, int N, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("sharpness_lower_bound: eps must be in (0, 1]");
    // (1/N) (alpha_d / k) int_eps^1 omega'/omega dr with k = alpha_d*omega(1);
    // the antiderivative of omega'/omega is ln(omega), so the bound is exact
    // for every profile.
    const double omega1 = w.omega(1.0);
    return std::log(omega1 / w.omega(eps)) / (static_cast<double>(N) * omega1);
}

double sharpness_monte_carlo(const OmegaSpec& w, int d, int N, double eps, std::size_t M,
                             std::uint64_t seed) {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error("sharpness_monte_carlo: eps must be in (0, 1]");
    const Marginal m = sharpness_marginal(w, d, N, M, seed);
    // (1/N) E_{pi(Q)}[ 1/omega(|x|) ; |x| >= eps ]; the cloud carries
    // (N-1)/N of pi(Q), so rescale sample weights by N/(N-1).
    const double rescale = static_cast<double>(N) / (static_cast<double>(N) - 1.0);
    StableAccumulator acc;
    for (const auto& s : m.diffuse.samples) {
        const double r = dist(s.x, Point{std::vector<double>(d, 0.0)});
        if (r >= eps) acc.add(s.w * rescale / w.omega(r));
    }
    return acc.value() / static_cast<double>(N);
}

}  // namespace mmot
