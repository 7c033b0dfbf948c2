#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mmot/construct.hpp"
#include "mmot/errors.hpp"
#include "mmot/verify.hpp"

using namespace mmot;
using namespace mmot::test;

namespace {

Marginal small_mixed_marginal() {
    Marginal m;
    m.d = 1;
    m.atoms = make_atoms({{{2.0}, 0.3}});
    m.diffuse = line_cloud(70, 0.7);
    return m;
}

}  // namespace

TEST_CASE("check_marginals accepts construct output and reports tiny residuals") {
    const Marginal m = small_mixed_marginal();
    const Plan p = construct(m, 2);
    const auto rep = check_marginals(p, m);
    CHECK(rep.max_atom_residual <= 1e-9);
    CHECK(rep.unmatched_atom_mass <= 1e-9);
    CHECK(rep.max_cloud_residual <= 1e-9);
    CHECK(rep.unmatched_cloud_mass <= 1e-9);
    CHECK(rep.pass(1e-9, 1e-9));
    if (rep.dense_checked) CHECK(rep.max_dense_residual <= 1e-10);
}

TEST_CASE("check_marginals flags an injected block perturbation") {
    const Marginal m = small_mixed_marginal();
    Plan p = construct(m, 2);
    for (auto& b : p.blocks)
        if (std::holds_alternative<ProductBlock>(b)) {
            std::get<ProductBlock>(b).scale *= 1.0 + 1e-3;
            break;
        }
    const auto rep = check_marginals(p, m);
    CHECK_FALSE(rep.pass(1e-9, 1e-9));
    CHECK(rep.max_atom_residual >= 1e-4);
}

TEST_CASE("check_marginals: single-slot plan against its own measure") {
    Marginal m;
    m.d = 1;
    m.diffuse = line_cloud(64, 1.0);
    const Plan p = construct(m, 1);
    const auto rep = check_marginals(p, m);
    CHECK(rep.max_atom_residual == 0.0);
    CHECK(rep.max_cloud_residual == 0.0);
}

TEST_CASE("fault detection on random perturbations") {
    Rng rng(59);
    const Marginal m = small_mixed_marginal();
    const Plan base = construct(m, 3);
    for (int trial = 0; trial < 10; ++trial) {
        Plan p = base;
        // bump one block's mass by an absolute delta of at least 10x tolerance
        const double delta = 1e-8 * (1.0 + rng.uniform01() * 100.0);
        std::size_t target = static_cast<std::size_t>(rng.uniform01() * p.blocks.size());
        auto& b = p.blocks[std::min(target, p.blocks.size() - 1)];
        const double factor = 1.0 + delta / block_mass(b);
        if (std::holds_alternative<ProductBlock>(b))
            std::get<ProductBlock>(b).scale *= factor;
        else
            for (auto& t : std::get<MapBlock>(b).tuples) t.w *= factor;
        CHECK_FALSE(check_marginals(p, m).pass(1e-9, 1e-9));
    }
}

TEST_CASE("check_symmetry") {
    Plan p;
    p.arity = 2;
    p.d = 1;
    ProductBlock pb;
    pb.factors.push_back(Factor::atom(Point{0.0}, 1.0));
    pb.factors.push_back(Factor::atom(Point{1.0}, 1.0));
    p.blocks.push_back(pb);
    CHECK_FALSE(check_symmetry(p));  // raw product, a != b
    CHECK(check_symmetry(symmetrize(p)));

    Plan mp;
    mp.arity = 2;
    mp.d = 1;
    MapBlock mb;
    mb.symmetrized = true;
    mb.tuples.push_back({{Point{0.0}, Point{1.0}}, 0.5});
    mb.tuples.push_back({{Point{1.0}, Point{0.0}}, 0.5});
    mp.blocks.push_back(std::move(mb));
    CHECK(check_symmetry(mp));
}

TEST_CASE("exact_optimum_tiny: two equal atoms") {
    const AtomList atoms = make_atoms({{{0.0}, 0.5}, {{1.0}, 0.5}});
    const double opt = exact_optimum_tiny(atoms, 2, OmegaSpec::identity());
    CHECK(opt == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact_optimum_tiny: single atom cannot avoid the diagonal") {
    const AtomList atoms = make_atoms({{{0.0}, 1.0}});
    CHECK(std::isinf(exact_optimum_tiny(atoms, 2, OmegaSpec::identity())));
}

TEST_CASE("exact_optimum_tiny enforces the size cap") {
    AtomList atoms;
    for (int i = 0; i < 30; ++i) atoms.entries.push_back({Point{static_cast<double>(i)}, 1.0 / 30});
    CHECK_THROWS_AS(exact_optimum_tiny(atoms, 4, OmegaSpec::identity()), SizeCap);
}

TEST_CASE("oracle sandwich on a three-atom instance") {
    const AtomList atoms = make_atoms({{{0.0}, 0.4}, {{1.0}, 0.35}, {{2.0}, 0.25}});
    Marginal m;
    m.d = 1;
    m.atoms = atoms;
    const Plan p = construct(m, 2);
    const double built = plan_cost(p, OmegaSpec::identity());
    const double opt = exact_optimum_tiny(atoms, 2, OmegaSpec::identity());
    CHECK(std::isfinite(built));
    CHECK(std::isfinite(opt));
    CHECK(opt <= built + 1e-9);
}

TEST_CASE("certify produces a passing certificate for construct output") {
    const Marginal m = small_mixed_marginal();
    BuildStats stats;
    const Plan p = construct(m, 2, {}, &stats);
    const Certificate cert = certify(p, m, 2, OmegaSpec::identity(), {}, &stats);
    CHECK(cert.pass);
    CHECK(cert.separation > 0.0);
    CHECK(std::isfinite(cert.cost));
    CHECK(cert.cost_within_separation_bound);
    CHECK(cert.ledger_checks > 0);
    CHECK(cert.ledger_violations == 0);
    CHECK_FALSE(cert.config_digest.empty());
}
