#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmot/construct.hpp"
#include "mmot/cost.hpp"
#include "mmot/errors.hpp"
#include "mmot/io.hpp"
#include "mmot/verify.hpp"

namespace py = pybind11;
using namespace mmot;

namespace {

RunConfig make_config(std::uint64_t seed, int cutoff, double tol) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.k_cutoff = cutoff;
    cfg.atom_tol = tol;
    cfg.cloud_tol = tol;
    return cfg;
}

py::dict certificate_dict(const Certificate& cert) {
    py::dict marginal;
    marginal["max_atom_residual"] = cert.marginal.max_atom_residual;
    marginal["unmatched_atom_mass"] = cert.marginal.unmatched_atom_mass;
    marginal["max_cloud_residual"] = cert.marginal.max_cloud_residual;
    marginal["unmatched_cloud_mass"] = cert.marginal.unmatched_cloud_mass;
    marginal["mass_residual"] = cert.marginal.mass_residual;
    marginal["dense_checked"] = cert.marginal.dense_checked;
    marginal["max_dense_residual"] = cert.marginal.max_dense_residual;

    py::dict d;
    d["pass"] = cert.pass;
    d["marginal"] = marginal;
    d["symmetry_ok"] = cert.symmetry_ok;
    d["separation"] = cert.separation;
    d["cost"] = cert.cost;
    d["cost_within_separation_bound"] = cert.cost_within_separation_bound;
    d["arity"] = cert.arity;
    d["seed"] = cert.seed;
    d["config_hash"] = cert.config_digest;
    d["ledger_checks"] = cert.ledger_checks;
    d["ledger_violations"] = cert.ledger_violations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_mmot, m) {
    m.doc() = "Constructive symmetric multimarginal transport plans for repulsive costs";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationFailed>(m, "ValidationFailed", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<InsufficientMass>(m, "InsufficientMass", base.ptr());
    py::register_exception<DegenerateCloud>(m, "DegenerateCloud", base.ptr());

    py::class_<Marginal>(m, "Marginal")
        .def_static("from_json", [](const std::string& text) { return load_marginal(text); },
                    py::arg("text"), "Parse a marginal document (see the README for the schema)")
        .def_static("load", [](const std::string& path) { return load_marginal_file(path); },
                    py::arg("path"))
        .def("to_json", [](const Marginal& self) { return save_marginal(self); })
        .def_property_readonly("d", [](const Marginal& self) { return self.d; })
        .def_property_readonly("n_atoms", [](const Marginal& self) { return self.atoms.size(); })
        .def_property_readonly("n_samples",
                               [](const Marginal& self) { return self.diffuse.size(); })
        .def_property_readonly("mass", [](const Marginal& self) { return self.mass(); })
        .def_property_readonly("concentration",
                               [](const Marginal& self) { return concentration(self); })
        .def("__repr__", [](const Marginal& self) {
            return "<mmot.Marginal d=" + std::to_string(self.d) + " atoms=" +
                   std::to_string(self.atoms.size()) + " samples=" +
                   std::to_string(self.diffuse.size()) + ">";
        });

    py::class_<Plan>(m, "Plan")
        .def_static("from_json", [](const std::string& text) { return load_plan(text); },
                    py::arg("text"))
        .def_static("load", [](const std::string& path) { return load_plan_file(path); },
                    py::arg("path"))
        .def("to_json", [](const Plan& self) { return save_plan(self); })
        .def_property_readonly("arity", [](const Plan& self) { return self.arity; })
        .def_property_readonly("d", [](const Plan& self) { return self.d; })
        .def_property_readonly("n_blocks", [](const Plan& self) { return self.blocks.size(); })
        .def_property_readonly("mass", [](const Plan& self) { return self.mass(); })
        .def("__repr__", [](const Plan& self) {
            return "<mmot.Plan N=" + std::to_string(self.arity) + " blocks=" +
                   std::to_string(self.blocks.size()) + ">";
        });

    py::class_<OmegaSpec>(m, "Omega")
        .def_static("identity", &OmegaSpec::identity)
        .def_static("power", &OmegaSpec::power, py::arg("s"))
        .def_static("table", &OmegaSpec::table, py::arg("r"), py::arg("w"))
        .def_static("from_json", [](const std::string& text) { return load_omega(text); },
                    py::arg("text"))
        .def("__call__", &OmegaSpec::omega, py::arg("r"))
        .def("inverse", &OmegaSpec::omega_inverse, py::arg("u"));

    m.def(
        "validate",
        [](const Marginal& marginal, int n) {
            const auto rep = validate_marginal(marginal, n);
            std::vector<std::string> issues;
            for (const auto& i : rep.issues) issues.push_back(i.field + ": " + i.message);
            return issues;
        },
        py::arg("marginal"), py::arg("n"),
        "Issues preventing construction; an empty list means constructible");

    m.def(
        "construct",
        [](const Marginal& marginal, int n, std::uint64_t seed, int cutoff, double tol) {
            return construct(marginal, n, make_config(seed, cutoff, tol));
        },
        py::arg("marginal"), py::arg("n"), py::arg("seed") = RunConfig{}.seed,
        py::arg("cutoff") = RunConfig{}.k_cutoff, py::arg("tol") = RunConfig{}.atom_tol,
        "Build a symmetric plan of finite repulsive cost with the given marginal");

    m.def(
        "certify",
        [](const Plan& plan, const Marginal& marginal, int n, const OmegaSpec& omega,
           std::uint64_t seed, int cutoff, double tol) {
            return certificate_dict(
                certify(plan, marginal, n, omega, make_config(seed, cutoff, tol)));
        },
        py::arg("plan"), py::arg("marginal"), py::arg("n"),
        py::arg("omega") = OmegaSpec::identity(), py::arg("seed") = RunConfig{}.seed,
        py::arg("cutoff") = RunConfig{}.k_cutoff, py::arg("tol") = RunConfig{}.atom_tol,
        "Independent certification: marginals, symmetry, separation, cost");

    m.def(
        "plan_marginal", [](const Plan& plan) { return plan_marginal(plan); }, py::arg("plan"));
    m.def(
        "min_separation", [](const Plan& plan) { return min_separation(plan); }, py::arg("plan"));
    m.def(
        "plan_cost",
        [](const Plan& plan, const OmegaSpec& omega) { return plan_cost(plan, omega); },
        py::arg("plan"), py::arg("omega") = OmegaSpec::identity(),
        "Total interaction energy; +inf when two slots touch");

    m.def("sharpness_marginal", &sharpness_marginal, py::arg("omega"), py::arg("d"),
          py::arg("n"), py::arg("samples"), py::arg("seed") = 0,
          "The boundary marginal with concentration exactly 1/N");
    m.def("sharpness_lower_bound", &sharpness_lower_bound, py::arg("omega"), py::arg("n"),
          py::arg("eps"));
    m.def("sharpness_monte_carlo", &sharpness_monte_carlo, py::arg("omega"), py::arg("d"),
          py::arg("n"), py::arg("eps"), py::arg("samples"), py::arg("seed") = 0);

    m.def(
        "exact_optimum_tiny",
        [](const Marginal& marginal, int n, const OmegaSpec& omega) {
            return exact_optimum_tiny(marginal.atoms, n, omega);
        },
        py::arg("marginal"), py::arg("n"), py::arg("omega") = OmegaSpec::identity(),
        "LP optimum over the atom grid of a purely atomic marginal (tiny instances)");
}
