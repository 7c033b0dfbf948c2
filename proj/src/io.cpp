#include "mmot/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmot/errors.hpp"
#include "mmot/rng.hpp"

namespace mmot {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

double finite_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ParseError(field + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(field + ": value is not finite");
    return v;
}

Point point_of(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ParseError(field + ": expected a coordinate array");
    Point p;
    p.coords.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        p.coords.push_back(finite_number(j[i], field + "[" + std::to_string(i) + "]"));
    return p;
}

Cloud cloud_of(const json& j, int d, const std::string& field) {
    Cloud c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw ParseError(field + ": expected an object");
    const std::string type = j.value("type", "samples");

    if (type == "samples") {
        const auto& pts = j.at("points");
        const auto& wts = j.at("weights");
        if (!pts.is_array() || !wts.is_array() || pts.size() != wts.size())
            throw ParseError(field + ": points/weights must be arrays of equal length");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            Sample s;
            s.x = point_of(pts[i], field + ".points[" + std::to_string(i) + "]");
            if (static_cast<int>(s.x.dim()) != d)
                throw ParseError(field + ".points[" + std::to_string(i) + "]: dimension != d");
            s.w = finite_number(wts[i], field + ".weights[" + std::to_string(i) + "]");
            if (!(s.w > 0.0))
                throw ParseError(field + ".weights[" + std::to_string(i) +
                                 "]: must be strictly positive");
            c.samples.push_back(std::move(s));
        }
        if (j.contains("total_mass")) {
            const double declared = finite_number(j["total_mass"], field + ".total_mass");
            if (std::abs(declared - c.mass()) > 1e-9 * std::max(1.0, declared))
                throw ParseError(field + ".total_mass: does not match the sample weights");
        }
        return c;
    }

    if (type == "uniform_box") {
        const Point lo = point_of(j.at("lo"), field + ".lo");
        const Point hi = point_of(j.at("hi"), field + ".hi");
        if (static_cast<int>(lo.dim()) != d || static_cast<int>(hi.dim()) != d)
            throw ParseError(field + ": lo/hi dimension != d");
        for (int i = 0; i < d; ++i)
            if (!(hi[i] > lo[i])) throw ParseError(field + ": need hi > lo per coordinate");
        const double total = finite_number(j.at("total_mass"), field + ".total_mass");
        if (!(total > 0.0)) throw ParseError(field + ".total_mass: must be positive");
        if (!j.at("samples").is_number_unsigned())
            throw ParseError(field + ".samples: expected a positive integer");
        const std::size_t n = j["samples"].get<std::size_t>();
        if (n == 0) throw ParseError(field + ".samples: expected a positive integer");
        Rng rng(j.value("seed", std::uint64_t{0}));
        const double w = total / static_cast<double>(n);
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<double> x(d);
            for (int i = 0; i < d; ++i) x[i] = rng.uniform(lo[i], hi[i]);
            c.samples.push_back({Point{std::move(x)}, w});
        }
        return c;
    }
    throw ParseError(field + ".type: unknown diffuse type '" + type + "'");
}

json atoms_json(const AtomList& atoms) {
    json arr = json::array();
    for (const auto& a : atoms.entries) arr.push_back({{"x", a.x.coords}, {"b", a.b}});
    return arr;
}

json cloud_json(const Cloud& c) {
    json points = json::array(), weights = json::array();
    for (const auto& s : c.samples) {
        points.push_back(s.x.coords);
        weights.push_back(s.w);
    }
    return {{"type", "samples"}, {"total_mass", c.mass()}, {"points", points},
            {"weights", weights}};
}

AtomList atom_list_of(const json& j, int d, const std::string& field) {
    AtomList atoms;
    if (j.is_null()) return atoms;
    if (!j.is_array()) throw ParseError(field + ": expected an array");
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        Atom a;
        a.x = point_of(j[i].at("x"), f + ".x");
        if (static_cast<int>(a.x.dim()) != d) throw ParseError(f + ".x: dimension != d");
        a.b = finite_number(j[i].at("b"), f + ".b");
        if (!(a.b > 0.0)) throw ParseError(f + ".b: must be strictly positive");
        atoms.entries.push_back(std::move(a));
    }
    return atoms;
}

}  // namespace

Marginal load_marginal(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("marginal: expected an object");
    try {
        Marginal m;
        if (!j.contains("d") || !j["d"].is_number_integer())
            throw ParseError("d: expected an integer dimension");
        m.d = j["d"].get<int>();
        if (m.d < 1) throw ParseError("d: must be >= 1");
        if (j.contains("atoms")) m.atoms = atom_list_of(j["atoms"], m.d, "atoms");
        if (j.contains("diffuse")) m.diffuse = cloud_of(j["diffuse"], m.d, "diffuse");
        canonicalize(m.atoms);
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("marginal: ") + e.what());
    }
}

Marginal load_marginal_file(const std::string& path) { return load_marginal(read_file(path)); }

std::string save_marginal(const Marginal& m) {
    Marginal canon = m;
    canonicalize(canon.atoms);
    json j{{"d", canon.d}, {"atoms", atoms_json(canon.atoms)}};
    if (!canon.diffuse.empty()) j["diffuse"] = cloud_json(canon.diffuse);
    return j.dump(2) + "\n";
}

namespace {

Factor factor_of(const json& j, int d, const std::string& field) {
    const std::string kind = j.value("kind", "");
    if (kind == "atoms") return Factor::atomic(atom_list_of(j.at("entries"), d, field + ".entries"));
    if (kind == "cloud") return Factor::diffuse(cloud_of(j, d, field));
    throw ParseError(field + ".kind: expected 'atoms' or 'cloud'");
}

json factor_json(const Factor& f) {
    if (f.is_atomic())
        return {{"kind", "atoms"}, {"entries", atoms_json(std::get<AtomList>(f.measure))}};
    json c = cloud_json(std::get<Cloud>(f.measure));
    c["kind"] = "cloud";
    return c;
}

}  // namespace

Plan load_plan(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("plan: expected an object");
    try {
        Plan p;
        p.arity = j.at("N").get<int>();
        p.d = j.at("d").get<int>();
        if (p.arity < 1 || p.d < 1) throw ParseError("plan: N and d must be >= 1");
        for (std::size_t bi = 0; bi < j.at("blocks").size(); ++bi) {
            const auto& bj = j["blocks"][bi];
            const std::string field = "blocks[" + std::to_string(bi) + "]";
            const std::string kind = bj.value("kind", "");
            if (kind == "product") {
                ProductBlock pb;
                pb.scale = finite_number(bj.at("scale"), field + ".scale");
                pb.symmetrized = bj.value("symmetrized", false);
                for (std::size_t fi = 0; fi < bj.at("factors").size(); ++fi)
                    pb.factors.push_back(factor_of(bj["factors"][fi], p.d,
                                                   field + ".factors[" + std::to_string(fi) + "]"));
                if (static_cast<int>(pb.factors.size()) != p.arity)
                    throw ParseError(field + ": factor count != N");
                p.blocks.push_back(std::move(pb));
            } else if (kind == "map") {
                MapBlock mb;
                mb.symmetrized = bj.value("symmetrized", false);
                for (std::size_t ti = 0; ti < bj.at("tuples").size(); ++ti) {
                    const auto& tj = bj["tuples"][ti];
                    const std::string tf = field + ".tuples[" + std::to_string(ti) + "]";
                    MapTuple t;
                    for (const auto& xj : tj.at("x")) t.points.push_back(point_of(xj, tf + ".x"));
                    if (static_cast<int>(t.points.size()) != p.arity)
                        throw ParseError(tf + ": tuple length != N");
                    for (const auto& pt : t.points)
                        if (static_cast<int>(pt.dim()) != p.d)
                            throw ParseError(tf + ": point dimension != d");
                    t.w = finite_number(tj.at("w"), tf + ".w");
                    if (!(t.w > 0.0)) throw ParseError(tf + ".w: must be strictly positive");
                    mb.tuples.push_back(std::move(t));
                }
                p.blocks.push_back(std::move(mb));
            } else {
                throw ParseError(field + ".kind: expected 'product' or 'map'");
            }
        }
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
}

Plan load_plan_file(const std::string& path) { return load_plan(read_file(path)); }

std::string save_plan(const Plan& p, const RunConfig* cfg) {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
        if (std::holds_alternative<ProductBlock>(b)) {
            const auto& pb = std::get<ProductBlock>(b);
            json factors = json::array();
            for (const auto& f : pb.factors) factors.push_back(factor_json(f));
            blocks.push_back({{"kind", "product"},
                              {"scale", pb.scale},
                              {"symmetrized", pb.symmetrized},
                              {"factors", factors}});
        } else {
            const auto& mb = std::get<MapBlock>(b);
            json tuples = json::array();
            for (const auto& t : mb.tuples) {
                json xs = json::array();
                for (const auto& pt : t.points) xs.push_back(pt.coords);
                tuples.push_back({{"x", xs}, {"w", t.w}});
            }
            blocks.push_back(
                {{"kind", "map"}, {"symmetrized", mb.symmetrized}, {"tuples", tuples}});
        }
    }
    json j{{"N", p.arity}, {"d", p.d}, {"blocks", blocks}};
    if (cfg) j["meta"] = {{"seed", cfg->seed}, {"config", config_hash(*cfg)}};
    return j.dump(2) + "\n";
}

OmegaSpec load_omega(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("omega: expected an object");
    const std::string kind = j.value("kind", "");
    try {
        if (kind == "identity") return OmegaSpec::identity();
        if (kind == "power") return OmegaSpec::power(finite_number(j.at("s"), "omega.s"));
        if (kind == "table")
            return OmegaSpec::table(j.at("r").get<std::vector<double>>(),
                                    j.at("w").get<std::vector<double>>());
    } catch (const Error& e) {
        throw ParseError(std::string("omega: ") + e.what());
    } catch (const json::exception& e) {
        throw ParseError(std::string("omega: ") + e.what());
    }
    throw ParseError("omega.kind: expected 'identity', 'power' or 'table'");
}

OmegaSpec load_omega_arg(const std::string& path_or_name) {
    if (path_or_name.empty() || path_or_name == "identity") return OmegaSpec::identity();
    if (path_or_name.rfind("power:", 0) == 0) {
        try {
            return OmegaSpec::power(std::stod(path_or_name.substr(6)));
        } catch (const std::exception&) {
            throw ParseError("omega: cannot parse '" + path_or_name + "'");
        }
    }
    return load_omega(read_file(path_or_name));
}

std::string save_omega(const OmegaSpec& w) {
    json j;
    switch (w.kind()) {
        case OmegaSpec::Kind::Identity:
            j = {{"kind", "identity"}};
            break;
        case OmegaSpec::Kind::Power:
            j = {{"kind", "power"}, {"s", w.exponent()}};
            break;
        case OmegaSpec::Kind::Table:
            j = {{"kind", "table"}, {"r", w.table_r()}, {"w", w.table_w()}};
            break;
    }
    return j.dump(2) + "\n";
}

std::string save_certificate(const Certificate& cert, int N) {
    json j{{"pass", cert.pass},
           {"N", N},
           {"arity", cert.arity},
           {"marginal",
            {{"max_atom_residual", cert.marginal.max_atom_residual},
             {"unmatched_atom_mass", cert.marginal.unmatched_atom_mass},
             {"max_cloud_residual", cert.marginal.max_cloud_residual},
             {"unmatched_cloud_mass", cert.marginal.unmatched_cloud_mass},
             {"mass_residual", cert.marginal.mass_residual},
             {"dense_checked", cert.marginal.dense_checked},
             {"max_dense_residual", cert.marginal.max_dense_residual}}},
           {"symmetry_ok", cert.symmetry_ok},
           {"separation", cert.separation},
           {"cost", std::isfinite(cert.cost) ? json(cert.cost) : json("inf")},
           {"cost_within_separation_bound", cert.cost_within_separation_bound},
           {"seed", cert.seed},
           {"config_hash", cert.config_digest},
           {"config",
            {{"seed", cert.config.seed},
             {"k_cutoff", cert.config.k_cutoff},
             {"mass_tol", cert.config.mass_tol},
             {"atom_tol", cert.config.atom_tol},
             {"cloud_tol", cert.config.cloud_tol},
             {"dual_tol", cert.config.dual_tol},
             {"expand_cap", cert.config.expand_cap},
             {"cost_pair_cap", cert.config.cost_pair_cap},
             {"max_sample_weight_fraction", cert.config.max_sample_weight_fraction},
             {"duplicate_mass_factor", cert.config.duplicate_mass_factor}}},
           {"ledger", {{"checks", cert.ledger_checks}, {"violations", cert.ledger_violations}}}};
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << text;
}

}  // namespace mmot
