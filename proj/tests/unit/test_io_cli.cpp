#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "mmot/cli.hpp"
#include "mmot/construct.hpp"
#include "mmot/cost.hpp"
#include "mmot/errors.hpp"
#include "mmot/io.hpp"

using namespace mmot;
using namespace mmot::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "mmot_cli_test";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

Marginal demo_marginal() {
    Marginal m;
    m.d = 1;
    m.atoms = make_atoms({{{2.0}, 0.3}});
    m.diffuse = line_cloud(70, 0.7);
    return m;
}

}  // namespace

TEST_CASE("plan json roundtrip is bit-exact") {
    Rng rng(61);
    const Plan p = symmetrize(random_small_plan(rng, 3, 2));
    const std::string text = save_plan(p);
    const Plan q = load_plan(text);
    CHECK(save_plan(q) == text);
    CHECK(q.mass() == p.mass());
    CHECK(q.arity == p.arity);
}

TEST_CASE("cli construct writes plan and certificate, exit 0") {
    TempDir tmp;
    write_file(tmp.file("m.json"), save_marginal(demo_marginal()));
    const int rc = run_cli({"construct", tmp.file("m.json"), "--n", "2", "--out",
                            tmp.file("out")});
    CHECK(rc == 0);
    CHECK(fs::exists(tmp.file("out.plan.json")));
    CHECK(fs::exists(tmp.file("out.cert.json")));

    const auto cert = nlohmann::json::parse(read_file(tmp.file("out.cert.json")));
    CHECK(cert["pass"].get<bool>());
    CHECK(cert["ledger"]["violations"].get<int>() == 0);
    CHECK(cert["ledger"]["checks"].get<int>() > 0);

    // the written plan verifies against the written marginal
    const int rc2 = run_cli({"verify", tmp.file("out.plan.json"), tmp.file("m.json"), "--n",
                             "2", "--out", tmp.file("cert2.json")});
    CHECK(rc2 == 0);
}

TEST_CASE("cli construct rejects a boundary marginal with exit 2") {
    TempDir tmp;
    const Marginal sharp = sharpness_marginal(OmegaSpec::identity(), 1, 3, 256, 5);
    write_file(tmp.file("sharp.json"), save_marginal(sharp));
    const int rc = run_cli({"construct", tmp.file("sharp.json"), "--n", "3", "--out",
                            tmp.file("out")});
    CHECK(rc == 2);
}

TEST_CASE("cli construct on a missing file exits 1") {
    TempDir tmp;
    CHECK(run_cli({"construct", tmp.file("absent.json"), "--n", "2", "--out",
                   tmp.file("out")}) == 1);
}

TEST_CASE("cli cost prints the frozen map-plan value") {
    TempDir tmp;
    const Plan p = plan_diffuse(line_cloud(8), 2);
    write_file(tmp.file("plan.json"), save_plan(p));
    const int rc = run_cli({"cost", tmp.file("plan.json"), "--omega", "identity", "--out",
                            tmp.file("cost.json")});
    CHECK(rc == 0);
    const auto j = nlohmann::json::parse(read_file(tmp.file("cost.json")));
    CHECK(j["cost"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

    // power with exponent 1 is the identity profile
    CHECK(run_cli({"cost", tmp.file("plan.json"), "--omega", "power:1.0", "--out",
                   tmp.file("cost_p1.json")}) == 0);
    CHECK(nlohmann::json::parse(read_file(tmp.file("cost_p1.json")))["cost"].get<double>() ==
          doctest::Approx(2.0).epsilon(1e-12));

    // touching block reports literal "inf"
    Plan diag;
    diag.arity = 2;
    diag.d = 1;
    ProductBlock pb;
    pb.symmetrized = true;
    pb.factors.push_back(Factor::atom(Point{1.0}, 1.0));
    pb.factors.push_back(Factor::atom(Point{1.0}, 1.0));
    diag.blocks.push_back(std::move(pb));
    write_file(tmp.file("diag.json"), save_plan(diag));
    CHECK(run_cli({"cost", tmp.file("diag.json"), "--out", tmp.file("inf.json")}) == 0);
    CHECK(nlohmann::json::parse(read_file(tmp.file("inf.json")))["cost"] == "inf");
}

TEST_CASE("cli sharpness emits the closed-form table") {
    TempDir tmp;
    const int rc = run_cli({"sharpness", "--n", "3", "--eps", "1e-2,1e-3,1e-4", "--samples",
                            "20000", "--out", tmp.file("table.csv")});
    CHECK(rc == 0);
    std::ifstream in(tmp.file("table.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "eps,closed_form_bound,monte_carlo_estimate,samples");
    std::vector<double> bounds;
    std::string line;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        bounds.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    REQUIRE(bounds.size() == 3);
    CHECK(bounds[0] == doctest::Approx(std::log(100.0) / 3.0).epsilon(1e-12));
    CHECK(bounds[1] == doctest::Approx(std::log(1000.0) / 3.0).epsilon(1e-12));
    CHECK(bounds[2] == doctest::Approx(std::log(10000.0) / 3.0).epsilon(1e-12));

    CHECK(run_cli({"sharpness", "--n", "3", "--eps", "1.5"}) == 1);

    // a truncation radius close to 1 leaves almost nothing of the integral
    REQUIRE(run_cli({"sharpness", "--n", "3", "--eps", "0.999", "--samples", "1000", "--out",
                     tmp.file("near_one.csv")}) == 0);
    std::ifstream in2(tmp.file("near_one.csv"));
    std::getline(in2, header);
    std::getline(in2, line);
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) ==
          doctest::Approx(std::log(1.0 / 0.999) / 3.0).epsilon(1e-9));
}

TEST_CASE("cli batch runs cases and honors expectations") {
    TempDir tmp;
    write_file(tmp.file("good.json"), save_marginal(demo_marginal()));
    write_file(tmp.file("bad.json"),
               save_marginal(sharpness_marginal(OmegaSpec::identity(), 1, 2, 128, 3)));
    nlohmann::json spec{
        {"cases",
         {{{"name", "good"}, {"n", 2}, {"marginal_path", tmp.file("good.json")}},
          {{"name", "boundary"},
           {"n", 2},
           {"marginal_path", tmp.file("bad.json")},
           {"expect", "reject"}}}}};
    write_file(tmp.file("spec.json"), spec.dump());
    const int rc = run_cli({"batch", tmp.file("spec.json"), "--out", tmp.file("report.csv")});
    CHECK(rc == 0);
    const std::string report = read_file(tmp.file("report.csv"));
    CHECK(report.find("good,2,pass") != std::string::npos);
    CHECK(report.find("boundary,2,rejected-by-validation") != std::string::npos);

    write_file(tmp.file("empty.json"), R"({"cases":[]})");
    CHECK(run_cli({"batch", tmp.file("empty.json")}) == 1);
}

TEST_CASE("outputs are bit-identical across runs") {
    TempDir tmp;
    write_file(tmp.file("m.json"), save_marginal(demo_marginal()));
    REQUIRE(run_cli({"construct", tmp.file("m.json"), "--n", "3", "--out", tmp.file("a")}) == 0);
    REQUIRE(run_cli({"construct", tmp.file("m.json"), "--n", "3", "--out", tmp.file("b")}) == 0);
    CHECK(read_file(tmp.file("a.plan.json")) == read_file(tmp.file("b.plan.json")));
    CHECK(read_file(tmp.file("a.cert.json")) == read_file(tmp.file("b.cert.json")));
}
