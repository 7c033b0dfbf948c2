#pragma once

#include <string>

#include "mmot/config.hpp"
#include "mmot/cost.hpp"
#include "mmot/measure.hpp"
#include "mmot/plan.hpp"
#include "mmot/verify.hpp"

namespace mmot {

/// Marginal document:
///   {"d": 2,
///    "atoms": [{"x": [0.0, 0.0], "b": 0.3}, ...],
///    "diffuse": {"type": "samples", "total_mass": 0.4,
///                "points": [[...], ...], "weights": [...]}}
/// The diffuse part may instead be
///   {"type": "uniform_box", "lo": [...], "hi": [...],
///    "total_mass": m, "samples": M, "seed": s}
/// which is expanded deterministically at load. load(save(m)) == m
/// bit-exactly on the canonical form.
Marginal load_marginal(const std::string& text);
Marginal load_marginal_file(const std::string& path);
std::string save_marginal(const Marginal& m);

/// Plan document:
///   {"N": ..., "d": ..., "blocks": [
///      {"kind": "product", "scale": ..., "symmetrized": true,
///       "factors": [{"kind": "atoms", ...} | {"kind": "cloud", ...}]},
///      {"kind": "map", "symmetrized": true,
///       "tuples": [{"x": [[...], ...], "w": ...}]}]}
Plan load_plan(const std::string& text);
Plan load_plan_file(const std::string& path);
std::string save_plan(const Plan& p, const RunConfig* cfg = nullptr);

/// Omega document: {"kind":"identity"} | {"kind":"power","s":2.0}
///                | {"kind":"table","r":[...],"w":[...]}
OmegaSpec load_omega(const std::string& text);
/// Accepts a path, or the shortcuts "identity" and "power:<s>".
OmegaSpec load_omega_arg(const std::string& path_or_name);
std::string save_omega(const OmegaSpec& w);

std::string save_certificate(const Certificate& cert, int N);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace mmot
