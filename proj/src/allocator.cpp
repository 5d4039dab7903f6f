#include "ppbai/allocator.hpp"

#include <algorithm>
#include <cmath>

namespace ppbai {

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

int score_bin(double score) {
    const int bin = static_cast<int>(score * 4.0);
    return std::min(std::max(bin, 0), 3);
}

double clipped_mean(const std::vector<double>& scores, double lambda, double pi_min) {
    double total = 0.0;
    for (double s : scores) total += clip(lambda * s, pi_min, 1.0);
    return total / static_cast<double>(scores.size());
}

}  // namespace

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::uniform: return "uniform";
        case PolicyKind::price_of_precision: return "price_of_precision";
        case PolicyKind::uncertainty_weighted: return "uncertainty_weighted";
        case PolicyKind::neyman: return "neyman";
        case PolicyKind::oracle: return "oracle";
        case PolicyKind::always: return "always";
        case PolicyKind::never: return "never";
    }
    throw std::invalid_argument("policy_name: unknown policy kind");
}

PolicyKind policy_from_name(const std::string& name) {
    for (PolicyKind kind :
         {PolicyKind::uniform, PolicyKind::price_of_precision, PolicyKind::uncertainty_weighted,
          PolicyKind::neyman, PolicyKind::oracle, PolicyKind::always, PolicyKind::never})
        if (policy_name(kind) == name) return kind;
    throw std::invalid_argument("policy_from_name: unknown policy '" + name + "'");
}

void AuditPolicyConfig::validate() const {
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("AuditPolicyConfig: pi_min must lie in (0,1]");
    if (budgeted() && !(rho >= pi_min && rho <= 1.0))
        throw std::invalid_argument("AuditPolicyConfig: need pi_min <= rho <= 1");
    if (warmup_audits < 0)
        throw std::invalid_argument("AuditPolicyConfig: warmup must be nonnegative");
    if (!(cost_ratio > 0.0))
        throw std::invalid_argument("AuditPolicyConfig: cost_ratio must be positive");
    if (!(pop_scale > 0.0))
        throw std::invalid_argument("AuditPolicyConfig: pop_scale must be positive");
}

void VarianceProxyState::observe(const SampleRecord& rec) {
    if (rec.arm < 0 || rec.arm >= static_cast<int>(arms.size()))
        throw std::invalid_argument("VarianceProxyState: arm index out of range");
    ArmStats& a = arms[rec.arm];
    BinStats& b = a.bins[score_bin(rec.score)];
    ++a.n_pulls;
    ++b.n_pulls;
    a.sum_score += rec.score;
    a.sum_score_sq += rec.score * rec.score;
    if (rec.audited) {
        if (!rec.label.has_value() || !(rec.propensity > 0.0))
            throw std::invalid_argument("VarianceProxyState: malformed audited record");
        const double d = *rec.label - rec.score;
        const double r = d / rec.propensity;
        ++a.n_audits;
        ++b.n_audits;
        a.sum_resid += r;
        a.sum_resid_sq += r * r;
        a.ipw_sq += d * d / rec.propensity;
        b.ipw_sq += d * d / rec.propensity;
    }
}

double VarianceProxyState::g_hat(int arm) const {
    const ArmStats& a = arms.at(arm);
    if (a.n_audits < warmup_audits || a.n_pulls == 0) return kPriorSecondMoment;
    return a.ipw_sq / static_cast<double>(a.n_pulls);
}

double VarianceProxyState::g_hat_at(int arm, double score) const {
    const ArmStats& a = arms.at(arm);
    const BinStats& b = a.bins[score_bin(score)];
    if (b.n_audits < warmup_audits || b.n_pulls == 0) return g_hat(arm);
    return b.ipw_sq / static_cast<double>(b.n_pulls);
}

double VarianceProxyState::resid_mean(int arm) const {
    const ArmStats& a = arms.at(arm);
    if (a.n_pulls == 0) return 0.0;
    return a.sum_resid / static_cast<double>(a.n_pulls);
}

double VarianceProxyState::score_sd(int arm) const {
    const ArmStats& a = arms.at(arm);
    if (a.n_pulls < 2) return 0.0;
    const double n = static_cast<double>(a.n_pulls);
    const double mean = a.sum_score / n;
    return std::sqrt(std::max(0.0, a.sum_score_sq / n - mean * mean));
}

double VarianceProxyState::resid_sd(int arm) const {
    const ArmStats& a = arms.at(arm);
    if (a.n_pulls < 2) return 0.0;
    const double n = static_cast<double>(a.n_pulls);
    const double mean = a.sum_resid / n;
    return std::sqrt(std::max(0.0, a.sum_resid_sq / n - mean * mean));
}

double solve_lambda(const std::vector<double>& scores, double rho, double pi_min) {
    if (scores.empty())
        throw std::invalid_argument("solve_lambda: empty score set");
    for (double s : scores)
        if (!(s >= 0.0))
            throw std::invalid_argument("solve_lambda: scores must be nonnegative");
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("solve_lambda: pi_min must lie in (0,1]");
    if (!(rho >= pi_min && rho <= 1.0))
        throw std::invalid_argument("solve_lambda: need pi_min <= rho <= 1");
    if (std::all_of(scores.begin(), scores.end(), [](double s) { return s == 0.0; }))
        return 1.0;  // every propensity sits at the floor regardless of lambda

    double lo = 1e-9, hi = 1e9;
    if (clipped_mean(scores, hi, pi_min) < rho) return hi;  // budget unreachable
    if (clipped_mean(scores, lo, pi_min) > rho) return lo;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_mean(scores, mid, pi_min) < rho)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double budget_score(const AuditPolicyConfig& cfg, const VarianceProxyState& state, int arm,
                    double gap_estimate) {
    switch (cfg.kind) {
        case PolicyKind::neyman:
            return std::sqrt(state.g_hat(arm));
        case PolicyKind::oracle:
            if (state.true_g.empty())
                throw std::invalid_argument("budget_score: oracle policy needs reference variances");
            return std::sqrt(state.true_g.at(arm));
        case PolicyKind::uncertainty_weighted:
            return (1.0 / (gap_estimate + 0.05)) * (std::abs(state.resid_mean(arm)) + 0.05) *
                   (state.g_hat(arm) + 0.05);
        case PolicyKind::uniform:
            return 1.0;  // normalizes back to rho
        default:
            throw std::invalid_argument("budget_score: policy has no budget score");
    }
}

double propensity(const AuditPolicyConfig& cfg, const VarianceProxyState& state, int arm,
                  double score, double gap_estimate, double lambda) {
    cfg.validate();
    switch (cfg.kind) {
        case PolicyKind::uniform:
            return cfg.rho;
        case PolicyKind::always:
            return 1.0;
        case PolicyKind::never:
            return 0.0;
        case PolicyKind::neyman: {
            const double s = cfg.binned_scores ? std::sqrt(state.g_hat_at(arm, score))
                                               : std::sqrt(state.g_hat(arm));
            return clip(lambda * s, cfg.pi_min, 1.0);
        }
        case PolicyKind::oracle: {
            if (state.true_g.empty())
                throw std::invalid_argument("propensity: oracle policy needs reference variances");
            return clip(lambda * std::sqrt(state.true_g.at(arm)), cfg.pi_min, 1.0);
        }
        case PolicyKind::uncertainty_weighted: {
            const double g = cfg.binned_scores ? state.g_hat_at(arm, score) : state.g_hat(arm);
            const double s = (1.0 / (gap_estimate + 0.05)) *
                             (std::abs(state.resid_mean(arm)) + 0.05) * (g + 0.05);
            return clip(lambda * s, cfg.pi_min, 1.0);
        }
        case PolicyKind::price_of_precision: {
            const auto& a = state.arms.at(arm);
            if (a.n_audits < state.warmup_audits)
                return std::max(cfg.rho, cfg.pi_min);  // uniform warm start
            const double sd_f = state.score_sd(arm);
            if (sd_f <= 0.0) return 1.0;  // degenerate judge: escalate everything
            const double ratio = state.resid_sd(arm) / sd_f;
            return clip(ratio * std::sqrt(cfg.cost_ratio) * cfg.pop_scale, cfg.pi_min, 1.0);
        }
    }
    throw std::invalid_argument("propensity: unknown policy kind");
}

std::vector<double> sqrt_rule_allocation(const std::vector<double>& g_values, double rho,
                                         double pi_min) {
    std::vector<double> scores(g_values.size());
    for (std::size_t i = 0; i < g_values.size(); ++i) {
        if (!(g_values[i] >= 0.0))
            throw std::invalid_argument("sqrt_rule_allocation: variances must be nonnegative");
        scores[i] = std::sqrt(g_values[i]);
    }
    const double lambda = solve_lambda(scores, rho, pi_min);
    std::vector<double> pis(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pis[i] = clip(lambda * scores[i], pi_min, 1.0);
    return pis;
}

double audit_objective(const std::vector<double>& g_values, const std::vector<double>& pis) {
    if (g_values.size() != pis.size())
        throw std::invalid_argument("audit_objective: mismatched lengths");
    double total = 0.0;
    for (std::size_t i = 0; i < g_values.size(); ++i) {
        if (!(pis[i] > 0.0))
            throw std::invalid_argument("audit_objective: propensities must be positive");
        total += g_values[i] / pis[i];
    }
    return total;
}

}  // namespace ppbai
