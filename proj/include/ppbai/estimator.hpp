#pragma once
// Per-arm estimation state for a cheap-score / audited-label bandit.
//
// Every pull of arm k yields a judge score f in [0,1].  With probability
// pi (assigned before the coin flip) the pull is audited, revealing the
// ground-truth label y and contributing an inverse-propensity-weighted
// correction r = (a/pi) * (y - f), a in {0,1}.  The point estimate of the
// arm mean is
//
//   theta_hat = mean(f) + mean(r)
//
// which is unbiased for E[y] under any history-measurable audit rule with
// pi >= pi_min > 0.  The anytime interval around theta_hat is the sum of
// the proxy and residual half-widths from boundary.hpp, with the residual
// variance process v_hat = sum of r^2.

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "ppbai/boundary.hpp"

namespace ppbai {

struct SampleRecord {
    std::int64_t t = 0;   // decision round; 0 marks warm-start pulls
    int arm = 0;
    int context = 0;      // environment segment drawn for this pull
    double score = 0.0;   // judge score f in [0,1]
    double propensity = 0.0;
    bool audited = false;
    std::optional<double> label;  // ground truth y, present iff audited
    double cost = 0.0;            // charge for this pull: c_f + audited * c_y
};

// Ingest-time validation: a record whose propensity undercuts the positivity
// floor it was supposedly generated under is evidence of misconfiguration and
// is rejected rather than clamped.  propensity == 0 is tolerated only for
// unaudited records (the explicit audit-free diagnostic mode).
inline void validate_record(const SampleRecord& rec, double pi_min) {
    if (!(rec.score >= 0.0 && rec.score <= 1.0))
        throw std::invalid_argument("SampleRecord: score must lie in [0,1]");
    if (rec.propensity < 0.0 || rec.propensity > 1.0)
        throw std::invalid_argument("SampleRecord: propensity must lie in [0,1]");
    if (rec.propensity == 0.0) {
        if (rec.audited)
            throw std::invalid_argument("SampleRecord: audited pull with zero propensity");
    } else if (rec.propensity < pi_min) {
        throw std::invalid_argument("SampleRecord: propensity below the positivity floor");
    }
    if (rec.audited && !rec.label.has_value())
        throw std::invalid_argument("SampleRecord: audited pull lacks a label");
}

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 1.0;
};

struct ArmState {
    int arm = 0;
    std::int64_t n_pulls = 0;
    std::int64_t n_audits = 0;
    double sum_score = 0.0;     // sum of judge scores f
    double sum_resid = 0.0;     // sum of weighted corrections r
    double sum_resid_sq = 0.0;  // sum of r^2 (residual variance process)

    void update(const SampleRecord& rec) {
        if (rec.arm != arm)
            throw std::invalid_argument("ArmState: record for a different arm");
        if (!(rec.score >= 0.0 && rec.score <= 1.0))
            throw std::invalid_argument("ArmState: score must lie in [0,1]");
        if (rec.propensity <= 0.0 && (rec.audited || rec.propensity < 0.0))
            throw std::invalid_argument("ArmState: propensity must be positive");
        if (rec.audited && !rec.label.has_value())
            throw std::invalid_argument("ArmState: audited pull lacks a label");
        ++n_pulls;
        sum_score += rec.score;
        if (rec.audited) {
            ++n_audits;
            const double r = (*rec.label - rec.score) / rec.propensity;
            sum_resid += r;
            sum_resid_sq += r * r;
        }
    }

    double score_mean() const { return sum_score / static_cast<double>(n_pulls); }
    double resid_mean() const { return sum_resid / static_cast<double>(n_pulls); }

    double point_estimate() const {
        if (n_pulls < 1)
            throw std::invalid_argument("ArmState: point estimate needs at least one pull");
        return score_mean() + resid_mean();
    }
};

// Anytime interval for the arm mean; the trivial [0,1] sentinel before the
// first pull.  Bounds are deliberately not clamped to [0,1]: the weighted
// corrections can push the center outside the unit interval and the width
// algebra stays exact.
inline ConfidenceInterval confidence_interval(const ArmState& state, const CsBudget& budget,
                                              double pi_min) {
    if (state.n_pulls == 0) return ConfidenceInterval{0.0, 1.0};
    const double center = state.point_estimate();
    const double width = proxy_width(state.n_pulls, budget.delta_k) +
                         residual_width(state.n_pulls, state.sum_resid_sq, pi_min, budget.delta_k);
    return ConfidenceInterval{center - width, center + width};
}

}  // namespace ppbai
