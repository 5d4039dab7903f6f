#pragma once
// Audit-allocation policies: who gets a ground-truth label, and how often.
//
// A policy assigns each pull an audit propensity pi in [pi_min, 1].  The
// budgeted policies spend a target average rate rho over the current
// candidate set by scaling a per-arm score s_k:
//
//   pi_k = clip(lambda * s_k, pi_min, 1),   mean_k pi_k = rho
//
// with lambda found by bisection (solve_lambda).  Score choices:
//
//   neyman              s_k = sqrt(g_hat_k),   g_hat_k ~ E[(y-f)^2 | k]
//   oracle              s_k = sqrt(g_k) with the true residual second moment
//   uncertainty_weighted  s_k = (1/(gap+0.05)) * (|mean resid|+0.05) * (g_hat+0.05)
//
// plus unbudgeted rules: uniform (pi = rho), always (1), never (0, a
// positivity-violating diagnostic), and price_of_precision, which sets
// pi = clip((sd_resid/sd_score) * sqrt(c_f/c_y) * scale, pi_min, 1) with no
// budget normalization.
//
// Plug-in variance estimates are not trusted until warmup_audits audited
// samples exist for the arm; before that g_hat falls back to a 1/4 prior
// (the worst-case second moment of a [0,1]-supported residual).

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppbai/estimator.hpp"

namespace ppbai {

enum class PolicyKind {
    uniform,
    price_of_precision,
    uncertainty_weighted,
    neyman,
    oracle,
    always,
    never,
};

std::string policy_name(PolicyKind kind);
PolicyKind policy_from_name(const std::string& name);

struct AuditPolicyConfig {
    PolicyKind kind = PolicyKind::uniform;
    double rho = 0.1;        // target average audit rate for budgeted kinds
    double pi_min = 0.05;    // positivity floor
    int warmup_audits = 10;  // audited samples before plug-in estimates are trusted
    double cost_ratio = 0.05;  // c_f / c_y, used by price_of_precision
    double pop_scale = 1.0;    // extra multiplier for price_of_precision
    bool binned_scores = false;  // estimate g per (arm, score-quartile) instead of per arm

    bool budgeted() const {
        return kind == PolicyKind::uniform || kind == PolicyKind::neyman ||
               kind == PolicyKind::oracle || kind == PolicyKind::uncertainty_weighted;
    }
    void validate() const;
};

// Running audit statistics the policies feed on, per arm and per
// score-quartile bin.  Single-owner, per-trial state.
struct VarianceProxyState {
    struct BinStats {
        std::int64_t n_pulls = 0;
        std::int64_t n_audits = 0;
        double ipw_sq = 0.0;  // sum of (a/pi) * (y - f)^2
    };
    struct ArmStats {
        std::int64_t n_pulls = 0;
        std::int64_t n_audits = 0;
        double sum_score = 0.0;
        double sum_score_sq = 0.0;
        double sum_resid = 0.0;     // sum of r = (a/pi)(y - f)
        double sum_resid_sq = 0.0;  // sum of r^2
        double ipw_sq = 0.0;        // sum of (a/pi)(y - f)^2
        std::array<BinStats, 4> bins{};
    };

    static constexpr double kPriorSecondMoment = 0.25;

    int warmup_audits = 10;
    std::vector<ArmStats> arms;
    std::vector<double> true_g;  // reference variances, required by PolicyKind::oracle

    VarianceProxyState(int num_arms, int warmup)
        : warmup_audits(warmup), arms(static_cast<std::size_t>(num_arms)) {
        if (num_arms < 1)
            throw std::invalid_argument("VarianceProxyState: need at least one arm");
        if (warmup < 0)
            throw std::invalid_argument("VarianceProxyState: warmup must be nonnegative");
    }

    void observe(const SampleRecord& rec);

    double g_hat(int arm) const;                    // per-arm plug-in with warmup prior
    double g_hat_at(int arm, double score) const;   // per-bin plug-in, arm-level fallback
    double resid_mean(int arm) const;
    double score_sd(int arm) const;
    double resid_sd(int arm) const;
};

// Smallest lambda (up to bisection precision) with
// mean_i clip(lambda * s_i, pi_min, 1) = rho.  Scores must be nonnegative;
// if every score is zero the propensities all sit at the floor and lambda
// is reported as 1.  When rho is unreachable (scores too sparse), returns
// the bracket end whose mean is closest.
double solve_lambda(const std::vector<double>& scores, double rho, double pi_min);

// Per-pull audit propensity.  `lambda` is the budget multiplier already
// solved over the round's candidate set (ignored by unbudgeted kinds);
// `gap_estimate` is the current leader-challenger gap (uncertainty_weighted
// only); `score` selects the quartile bin when binned_scores is on.
double propensity(const AuditPolicyConfig& cfg, const VarianceProxyState& state, int arm,
                  double score, double gap_estimate, double lambda);

// Arm-level score the budget solve uses for this policy (budgeted kinds).
double budget_score(const AuditPolicyConfig& cfg, const VarianceProxyState& state, int arm,
                    double gap_estimate);

// Closed-form square-root allocation against known per-stratum variances:
// pi_i = clip(lambda* sqrt(g_i), pi_min, 1) with the budget met exactly.
std::vector<double> sqrt_rule_allocation(const std::vector<double>& g_values, double rho,
                                         double pi_min);

// The variance functional the allocation minimizes: sum_i g_i / pi_i.
double audit_objective(const std::vector<double>& g_values, const std::vector<double>& pis);

}  // namespace ppbai
