#pragma once
// Time-uniform ("anytime") confidence boundaries built from a polynomial
// stitched bound (cf. Howard, Ramdas, McAuliffe & Sekhon, "Time-uniform,
// nonparametric, nonasymptotic confidence sequences", Ann. Stat. 2021):
//
//   psi(v; alpha) = 1.7 * sqrt(v * (ln ln(2v) + 0.72 * ln(5.2 / alpha)))
//
// valid for an intrinsic-time (variance) process v >= 1; we floor v at 1 so
// callers may pass the raw variance process from the first observation on.
// Two derived interval half-widths share this boundary:
//
//   proxy    : mean of n bounded scores, variance process n/4,
//              half-width psi(n/4; delta_k/2) / n
//   residual : mean of n inverse-propensity-weighted corrections with
//              empirical variance v_hat and weights bounded by 1/pi_min,
//              half-width (psi(v_hat; delta_k/2)
//                          + 0.45 * (2/pi_min) * ln(10.4/delta_k)) / n
//
// delta_k is the per-arm failure budget; each boundary is evaluated at
// delta_k/2 to cover both tails, and ln(10.4/delta_k) = ln(5.2/(delta_k/2)).

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppbai {

struct BoundaryParams {
    double alpha = 0.05;       // failure probability in (0,1)
    double leading_coeff = 1.7;
    double log_coeff = 0.72;
    double alpha_scale = 5.2;
    double range_coeff = 0.45;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("BoundaryParams: alpha must lie in (0,1)");
        if (leading_coeff <= 0.0 || log_coeff <= 0.0 || alpha_scale <= 1.0 || range_coeff <= 0.0)
            throw std::invalid_argument("BoundaryParams: coefficients must be positive");
    }
};

// Failure-probability budget for a K-arm confidence sequence: the global
// delta is split evenly, delta_k = delta / K, one share per arm.
struct CsBudget {
    double delta;
    int num_arms;
    double delta_k;

    CsBudget(double delta_, int num_arms_)
        : delta(delta_), num_arms(num_arms_), delta_k(delta_ / num_arms_) {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("CsBudget: delta must lie in (0,1)");
        if (num_arms < 1)
            throw std::invalid_argument("CsBudget: need at least one arm");
    }
};

inline double stitched_bound(double v, double alpha, const BoundaryParams& p = {}) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stitched_bound: alpha must lie in (0,1)");
    if (v < 0.0)
        throw std::invalid_argument("stitched_bound: variance process must be nonnegative");
    const double v_eff = std::max(v, 1.0);
    // ln ln(2 v_eff) can be mildly negative near v_eff = 1; only the full
    // radicand is clamped, never the individual terms.
    const double radicand =
        v_eff * (std::log(std::log(2.0 * v_eff)) + p.log_coeff * std::log(p.alpha_scale / alpha));
    return p.leading_coeff * std::sqrt(std::max(radicand, 0.0));
}

// Half-width of the anytime interval around the mean judge score after
// n_pulls observations in [0,1] (sub-Gaussian scale 1/2 per observation).
inline double proxy_width(long n_pulls, double delta_k, const BoundaryParams& p = {}) {
    if (n_pulls < 1)
        throw std::invalid_argument("proxy_width: need at least one pull");
    if (!(delta_k > 0.0 && delta_k < 1.0))
        throw std::invalid_argument("proxy_width: delta_k must lie in (0,1)");
    const double n = static_cast<double>(n_pulls);
    return stitched_bound(n / 4.0, delta_k / 2.0, p) / n;
}

// Half-width of the anytime interval around the mean weighted correction:
// variance-adaptive stitched term plus a range term scaling with the weight
// bound 2/pi_min.  Finite and shrinking even with v_hat = 0 (no audits yet).
inline double residual_width(long n_pulls, double v_hat, double pi_min, double delta_k,
                             const BoundaryParams& p = {}) {
    if (n_pulls < 1)
        throw std::invalid_argument("residual_width: need at least one pull");
    if (v_hat < 0.0)
        throw std::invalid_argument("residual_width: v_hat must be nonnegative");
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("residual_width: pi_min must lie in (0,1]");
    if (!(delta_k > 0.0 && delta_k < 1.0))
        throw std::invalid_argument("residual_width: delta_k must lie in (0,1)");
    const double n = static_cast<double>(n_pulls);
    const double range_term =
        p.range_coeff * (2.0 / pi_min) * std::log(2.0 * p.alpha_scale / delta_k);
    return (stitched_bound(v_hat, delta_k / 2.0, p) + range_term) / n;
}

}  // namespace ppbai
