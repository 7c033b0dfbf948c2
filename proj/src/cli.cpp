#include "mmot/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmot/construct.hpp"
#include "mmot/errors.hpp"
#include "mmot/io.hpp"
#include "mmot/verify.hpp"

namespace mmot {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInternal = 3;

struct CommonOpts {
    std::uint64_t seed = RunConfig{}.seed;
    int cutoff = RunConfig{}.k_cutoff;
    double tol = RunConfig{}.atom_tol;

    RunConfig config() const {
        RunConfig cfg;
        cfg.seed = seed;
        cfg.k_cutoff = cutoff;
        cfg.atom_tol = tol;
        cfg.cloud_tol = tol;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Seed for all pseudo-random choices");
    cmd->add_option("--cutoff", opts.cutoff, "Atom count above which the tail reduction runs");
    cmd->add_option("--tol", opts.tol, "Certificate residual tolerance");
}

std::string cost_string(double cost) {
    if (!std::isfinite(cost)) return "inf";
    std::ostringstream ss;
    ss.precision(17);
    ss << cost;
    return ss.str();
}

int cmd_construct(const std::string& marginal_path, int n, const std::string& omega_arg,
                  const std::string& out_prefix, const CommonOpts& opts) {
    const RunConfig cfg = opts.config();
    const Marginal m = load_marginal_file(marginal_path);
    const OmegaSpec omega = load_omega_arg(omega_arg);

    BuildStats stats;
    const Plan plan = construct(m, n, cfg, &stats);
    const Certificate cert = certify(plan, m, n, omega, cfg, &stats);

    write_file(out_prefix + ".plan.json", save_plan(plan, &cfg));
    write_file(out_prefix + ".cert.json", save_certificate(cert, n));

    std::cout << (cert.pass ? "PASS" : "FAIL") << " separation=" << cert.separation
              << " cost=" << cost_string(cert.cost) << " blocks=" << plan.blocks.size() << "\n";
    return cert.pass ? kExitOk : kExitInternal;
}

int cmd_cost(const std::string& plan_path, const std::string& omega_arg,
             const std::string& out_path, const CommonOpts& opts) {
    const Plan plan = load_plan_file(plan_path);
    const OmegaSpec omega = load_omega_arg(omega_arg);
    double subsample_error = 0.0;
    const double cost = plan_cost(plan, omega, opts.config(), &subsample_error);
    std::cout << cost_string(cost) << "\n";
    if (!out_path.empty()) {
        nlohmann::json j{{"cost", std::isfinite(cost) ? nlohmann::json(cost)
                                                      : nlohmann::json("inf")},
                         {"subsample_error_estimate", subsample_error}};
        write_file(out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_verify(const std::string& plan_path, const std::string& marginal_path, int n,
               const std::string& omega_arg, const std::string& out_path,
               const CommonOpts& opts) {
    const RunConfig cfg = opts.config();
    const Plan plan = load_plan_file(plan_path);
    const Marginal m = load_marginal_file(marginal_path);
    const OmegaSpec omega = load_omega_arg(omega_arg);
    const Certificate cert = certify(plan, m, n, omega, cfg);
    if (!out_path.empty()) write_file(out_path, save_certificate(cert, n));
    std::cout << (cert.pass ? "PASS" : "FAIL") << " max_atom_residual="
              << cert.marginal.max_atom_residual << " separation=" << cert.separation
              << " cost=" << cost_string(cert.cost) << "\n";
    return cert.pass ? kExitOk : kExitValidation;
}

int cmd_sharpness(const std::string& omega_arg, int n, int d,
                  const std::vector<double>& eps_list, std::size_t samples,
                  const std::string& out_path, const CommonOpts& opts) {
    if (n < 2) throw ParseError("sharpness: need --n >= 2");
    for (double eps : eps_list)
        if (!(eps > 0.0 && eps < 1.0)) throw ParseError("sharpness: eps must lie in (0, 1)");
    const OmegaSpec omega = load_omega_arg(omega_arg);

    std::ostringstream csv;
    csv.precision(17);
    csv << "eps,closed_form_bound,monte_carlo_estimate,samples\n";
    for (double eps : eps_list) {
        const double bound = sharpness_lower_bound(omega, n, eps);
        const double mc = sharpness_monte_carlo(omega, d, n, eps, samples, opts.seed);
        csv << eps << ',' << bound << ',' << mc << ',' << samples << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return kExitOk;
}

int cmd_batch(const std::string& spec_path, const std::string& out_path,
              const CommonOpts& opts) {
    nlohmann::json spec;
    try {
        spec = nlohmann::json::parse(read_file(spec_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("batch spec: ") + e.what());
    }
    if (!spec.is_object() || !spec.contains("cases") || !spec["cases"].is_array() ||
        spec["cases"].empty())
        throw ParseError("batch spec: expected a non-empty 'cases' array");

    std::ostringstream csv;
    csv << "name,n,outcome,detail\n";
    bool all_ok = true;
    for (const auto& c : spec["cases"]) {
        std::string name;
        int n = 0;
        bool expect_reject = false;
        CommonOpts case_opts = opts;
        try {
            name = c.value("name", "case");
            n = c.at("n").get<int>();
            expect_reject = c.value("expect", "pass") == std::string("reject");
            if (c.contains("seed")) case_opts.seed = c["seed"].get<std::uint64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("batch case: ") + e.what());
        }
        const RunConfig cfg = case_opts.config();

        std::string outcome, detail;
        try {
            const Marginal m = c.contains("marginal_path")
                                   ? load_marginal_file(c["marginal_path"].get<std::string>())
                                   : load_marginal(c.at("marginal").dump());
            BuildStats stats;
            const Plan plan = construct(m, n, cfg, &stats);
            const Certificate cert = certify(plan, m, n, OmegaSpec::identity(), cfg, &stats);
            if (expect_reject) {
                outcome = "unexpected-pass";
                all_ok = false;
            } else if (cert.pass) {
                outcome = "pass";
                detail = "cost=" + cost_string(cert.cost);
            } else {
                outcome = "fail";
                detail = "certificate failed";
                all_ok = false;
            }
        } catch (const ValidationFailed&) {
            if (expect_reject) {
                outcome = "rejected-by-validation";
                detail = "expected";
            } else {
                outcome = "rejected-unexpected";
                all_ok = false;
            }
        } catch (const ParseError&) {
            throw;  // malformed case: fail the whole batch as a parse error
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("batch case '") + name + "': " + e.what());
        } catch (const Error& e) {
            outcome = "error";
            detail = e.what();
            all_ok = false;
        }
        csv << name << ',' << n << ',' << outcome << ',' << '"' << detail << '"' << "\n";
    }
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return all_ok ? kExitOk : kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Symmetric multimarginal transport plans of finite repulsive cost"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string marginal_path, plan_path, omega_arg = "identity", out_arg, spec_path;
    int n = 2, d = 1;
    std::vector<double> eps_list;
    std::size_t samples = 100000;

    auto* construct_cmd =
        app.add_subcommand("construct", "Build and certify a plan for a marginal");
    construct_cmd->add_option("marginal", marginal_path, "Marginal JSON file")->required();
    construct_cmd->add_option("--n", n, "Number of slots")->required();
    construct_cmd->add_option("--omega", omega_arg, "Omega file, 'identity' or 'power:<s>'");
    construct_cmd->add_option("--out", out_arg, "Output prefix (.plan.json / .cert.json)")
        ->required();
    add_common(construct_cmd, opts);

    auto* cost_cmd = app.add_subcommand("cost", "Evaluate the cost of a plan file");
    cost_cmd->add_option("plan", plan_path, "Plan JSON file")->required();
    cost_cmd->add_option("--omega", omega_arg, "Omega file, 'identity' or 'power:<s>'");
    cost_cmd->add_option("--out", out_arg, "Optional JSON output path");
    add_common(cost_cmd, opts);

    auto* verify_cmd = app.add_subcommand("verify", "Certify a plan against a marginal");
    verify_cmd->add_option("plan", plan_path, "Plan JSON file")->required();
    verify_cmd->add_option("marginal", marginal_path, "Marginal JSON file")->required();
    verify_cmd->add_option("--n", n, "Number of slots")->required();
    verify_cmd->add_option("--omega", omega_arg, "Omega file, 'identity' or 'power:<s>'");
    verify_cmd->add_option("--out", out_arg, "Certificate JSON output path");
    add_common(verify_cmd, opts);

    auto* sharp_cmd =
        app.add_subcommand("sharpness", "Tabulate the diverging truncated lower bound");
    sharp_cmd->add_option("--omega", omega_arg, "Omega file, 'identity' or 'power:<s>'");
    sharp_cmd->add_option("--n", n, "Number of slots")->required();
    sharp_cmd->add_option("--d", d, "Ambient dimension for the sampled cloud");
    sharp_cmd->add_option("--eps", eps_list, "Truncation radii in (0,1)")
        ->required()
        ->delimiter(',');
    sharp_cmd->add_option("--samples", samples, "Monte-Carlo sample count");
    sharp_cmd->add_option("--out", out_arg, "CSV output path (stdout if omitted)");
    add_common(sharp_cmd, opts);

    auto* batch_cmd = app.add_subcommand("batch", "Run construct+verify over a case list");
    batch_cmd->add_option("spec", spec_path, "Batch spec JSON file")->required();
    batch_cmd->add_option("--out", out_arg, "CSV report path (stdout if omitted)");
    add_common(batch_cmd, opts);

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>("mmot"));
    for (auto& a : argv_copy) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (construct_cmd->parsed()) return cmd_construct(marginal_path, n, omega_arg, out_arg, opts);
        if (cost_cmd->parsed()) return cmd_cost(plan_path, omega_arg, out_arg, opts);
        if (verify_cmd->parsed())
            return cmd_verify(plan_path, marginal_path, n, omega_arg, out_arg, opts);
        if (sharp_cmd->parsed())
            return cmd_sharpness(omega_arg, n, d, eps_list, samples, out_arg, opts);
        if (batch_cmd->parsed()) return cmd_batch(spec_path, out_arg, opts);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationFailed& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitParse;
}

}  // namespace mmot
