#pragma once

#include <cstdint>
#include <vector>

#include "mmot/config.hpp"
#include "mmot/measure.hpp"
#include "mmot/plan.hpp"

namespace mmot {

/// Repulsive interaction profile: omega is continuous, strictly increasing,
/// omega(0) = 0; the pair interaction is 1/omega(|x - y|), infinite on
/// contact. Custom tables use monotone piecewise-linear interpolation
/// (linear continuation past the last node).
class OmegaSpec {
  public:
    enum class Kind { Identity, Power, Table };

    static OmegaSpec identity();
    static OmegaSpec power(double s);
    static OmegaSpec table(std::vector<double> r, std::vector<double> w);

    Kind kind() const { return kind_; }
    double exponent() const { return s_; }
    const std::vector<double>& table_r() const { return r_; }
    const std::vector<double>& table_w() const { return w_; }

    double omega(double r) const;
    double omega_prime(double r) const;
    double omega_inverse(double u) const;

  private:
    OmegaSpec() = default;
    Kind kind_ = Kind::Identity;
    double s_ = 1.0;
    std::vector<double> r_, w_;
};

/// 1/omega(r); +infinity at r = 0. Infinity is a value, never an exception:
/// infeasibility must be observable.
double pair_potential(const OmegaSpec& w, double r);

/// Total interaction energy of the plan, evaluated blockwise without tensor
/// expansion. Symmetrization flags do not change the value (the cost is a
/// symmetric function). Cloud factors larger than cfg.cost_pair_cap are
/// stratified down to that many equal-mass representatives; when that
/// happens and subsample_error is non-null it receives a half-resolution
/// difference estimate of the subsampling error (0 when exact).
double plan_cost(const Plan& p, const OmegaSpec& w, const RunConfig& cfg = {},
                 double* subsample_error = nullptr);

/// Volume of the d-dimensional unit ball.
double unit_ball_volume(int d);

/// Constants of the boundary-case construction: the unit-ball volume and
/// the normalizer of the radial density, alpha_d * omega(1).
struct SharpnessConstants {
    double alpha_d = 0.0;
    double kconst = 0.0;
};

SharpnessConstants sharpness_constants(const OmegaSpec& w, int d);

/// The boundary-case marginal for a given profile: an atom of mass 1/N at
/// the origin plus a cloud of M equal-weight samples of total mass (N-1)/N
/// drawn from the density proportional to omega'(|x|)/|x|^(d-1) on the unit
/// ball (radial inverse-CDF with stratified uniforms, seeded sphere
/// directions). Its concentration is exactly 1/N, so validation rejects it.
Marginal sharpness_marginal(const OmegaSpec& w, int d, int N, std::size_t M,
                            std::uint64_t seed);

/// Closed-form truncated lower bound ln(omega(1)/omega(eps)) / (N*omega(1))
/// on the cost of any plan for the boundary marginal; diverges as eps -> 0.
double sharpness_lower_bound(const OmegaSpec& w, int N, double eps);

/// The same truncated integral estimated from the sampled cloud; used to
/// cross-check the closed form.
double sharpness_monte_carlo(const OmegaSpec& w, int d, int N, double eps, std::size_t M,
                             std::uint64_t seed);

}  // namespace mmot
