#include <doctest.h>

#include "helpers.hpp"
#include "mmot/errors.hpp"
#include "mmot/io.hpp"
#include "mmot/measure.hpp"
#include "mmot/rng.hpp"

using namespace mmot;
using namespace mmot::test;

TEST_CASE("concentration is the largest atom weight") {
    Marginal m;
    m.d = 1;
    m.atoms = make_atoms({{{0.0}, 0.4}, {{1.0}, 0.35}, {{2.0}, 0.25}});
    CHECK(concentration(m) == 0.4);

    Marginal cloud_only;
    cloud_only.d = 1;
    cloud_only.diffuse = line_cloud(64, 1.0);
    CHECK(concentration(cloud_only) == 0.0);

    Marginal mixed;
    mixed.d = 1;
    mixed.diffuse = line_cloud(64, 0.7);
    mixed.atoms = make_atoms({{{2.0}, 0.3}});
    CHECK(concentration(mixed) == 0.3);
}

TEST_CASE("validate_marginal checks mass, order and concentration") {
    Marginal ok;
    ok.d = 1;
    ok.atoms = make_atoms({{{0.0}, 0.3}, {{1.0}, 0.3}, {{2.0}, 0.2}, {{3.0}, 0.2}});
    CHECK(validate_marginal(ok, 3).ok());

    Marginal boundary;
    boundary.d = 1;
    boundary.atoms = make_atoms({{{0.0}, 0.5}});
    boundary.diffuse = line_cloud(64, 0.5);
    const auto rep = validate_marginal(boundary, 2);
    CHECK_FALSE(rep.ok());
    bool mentions_concentration = false;
    for (const auto& i : rep.issues) mentions_concentration |= i.field == "concentration";
    CHECK(mentions_concentration);

    Marginal heavy;
    heavy.d = 1;
    heavy.atoms = make_atoms({{{0.0}, 0.5}, {{1.0}, 0.4}});
    heavy.diffuse = line_cloud(64, 0.2);
    const auto rep2 = validate_marginal(heavy, 4);
    CHECK_FALSE(rep2.ok());
    bool mentions_mass = false;
    for (const auto& i : rep2.issues) mentions_mass |= i.field == "mass";
    CHECK(mentions_mass);
}

TEST_CASE("validate_marginal flags unsorted weights, duplicates and fat samples") {
    Marginal m;
    m.d = 1;
    m.atoms.entries.push_back({Point{0.0}, 0.1});
    m.atoms.entries.push_back({Point{1.0}, 0.2});  // unsorted
    m.atoms.entries.push_back({Point{0.0}, 0.2});  // duplicate location
    m.diffuse = line_cloud(4, 0.5);                // 4 samples: each > |cloud|/64
    const auto rep = validate_marginal(m, 2);
    CHECK_FALSE(rep.ok());
    CHECK(rep.issues.size() >= 3);
}

TEST_CASE("validate_marginal warns when a cloud sample sits on an atom") {
    Marginal m;
    m.d = 1;
    m.atoms = make_atoms({{{0.25}, 0.2}});
    m.diffuse = line_cloud(64, 0.8);
    m.diffuse.samples[0].x = Point{0.25};  // co-located with the atom
    const auto rep = validate_marginal(m, 3);
    CHECK(rep.ok());
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("fast_decreasing_prefix matches the defining inequalities") {
    CHECK(fast_decreasing_prefix(std::vector<double>{0.5, 0.2, 0.15, 0.1, 0.05}, 3) == 1);
    CHECK(fast_decreasing_prefix(std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}, 3) == 0);
    CHECK(fast_decreasing_prefix(std::vector<double>{0.9, 0.05, 0.05}, 2) == 1);
}

TEST_CASE("fast_decreasing_prefix property: maximal and below N") {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3.0);
        const int k = n + 1 + static_cast<int>(rng.uniform01() * 8.0);
        auto b = random_sorted_weights(rng, k, 1.0, 1.0);
        const int ell = fast_decreasing_prefix(b, n);
        REQUIRE(ell < n);
        auto holds = [&](int j) {  // 1-based j
            double tail = 0.0;
            for (int i = j; i < k; ++i) tail += b[i];
            return static_cast<double>(n - j) * b[j - 1] > tail;
        };
        for (int j = 1; j <= ell; ++j) CHECK(holds(j));
        if (ell + 1 <= k - 1 && ell + 1 < n) CHECK_FALSE(holds(ell + 1));
    }
}

TEST_CASE("marginal json roundtrip and schema errors") {
    const std::string doc = R"({"d":2,"atoms":[{"x":[0.0,0.0],"b":0.3}],
        "diffuse":{"type":"samples","total_mass":0.7,
                   "points":[[0.25,0.5],[0.75,0.5]],"weights":[0.35,0.35]}})";
    const Marginal m = load_marginal(doc);
    CHECK(m.atoms.size() == 1);
    CHECK(m.d == 2);
    CHECK(m.diffuse.size() == 2);

    const std::string text = save_marginal(m);
    const Marginal again = load_marginal(text);
    CHECK(save_marginal(again) == text);  // bit-exact on the canonical form
    CHECK(again.atoms.entries[0].b == m.atoms.entries[0].b);
    CHECK(again.diffuse.samples[0].x == m.diffuse.samples[0].x);

    CHECK_THROWS_AS(load_marginal(R"({"d":1,"atoms":[{"x":[0.0],"b":-0.1}]})"), ParseError);
    try {
        load_marginal(R"({"d":1,"atoms":[{"x":[0.0],"b":-0.1}]})");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("atoms[0].b") != std::string::npos);
    }
}

TEST_CASE("uniform_box diffuse spec expands deterministically") {
    const std::string doc = R"({"d":2,"atoms":[],
        "diffuse":{"type":"uniform_box","lo":[0.0,0.0],"hi":[1.0,1.0],
                   "total_mass":1.0,"samples":128,"seed":5}})";
    const Marginal a = load_marginal(doc);
    const Marginal b = load_marginal(doc);
    REQUIRE(a.diffuse.size() == 128);
    CHECK(a.diffuse.mass() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < a.diffuse.size(); ++i) {
        CHECK(a.diffuse.samples[i].x == b.diffuse.samples[i].x);
        CHECK(a.diffuse.samples[i].w == b.diffuse.samples[i].w);
    }
}

TEST_CASE("canonicalize sorts by weight then location and merges duplicates") {
    AtomList a = make_atoms({{{1.0}, 0.2}, {{0.0}, 0.5}, {{2.0}, 0.2}, {{1.0}, 0.1}});
    canonicalize(a);
    REQUIRE(a.size() == 3);
    CHECK(a.entries[0].b == 0.5);
    CHECK(a.entries[1].b == doctest::Approx(0.3));  // merged 0.2 + 0.1 at x=1
    CHECK(a.entries[1].x == Point{1.0});
    CHECK(a.entries[2].b == 0.2);
}
