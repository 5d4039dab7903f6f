#include "ppbai/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ppbai {

namespace {

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

struct TrialRunner {
    const EnvironmentSpec& env;
    const EngineConfig& cfg;
    const AuditPolicyConfig& policy;
    std::mt19937_64 rng;
    std::vector<SampleRecord>* log;

    CsBudget budget;
    std::vector<ArmState> states;
    VarianceProxyState proxy;
    TrialResult result;

    TrialRunner(const EnvironmentSpec& env_, const EngineConfig& cfg_,
                const AuditPolicyConfig& policy_, std::uint64_t seed,
                const std::vector<double>& oracle_g, std::vector<SampleRecord>* log_)
        : env(env_),
          cfg(cfg_),
          policy(policy_),
          rng(seed),
          log(log_),
          budget(cfg_.delta, env_.num_arms()),
          proxy(env_.num_arms(), policy_.warmup_audits) {
        states.resize(env.num_arms());
        for (int k = 0; k < env.num_arms(); ++k) states[k].arm = k;
        proxy.true_g = oracle_g;
    }

    // The audit coin is drawn even for pi in {0,1} so that every pull
    // consumes the same number of draws under every policy.
    void record(int arm, std::int64_t t, const RoundSample& s, double pi) {
        const bool audited = uniform01(rng) < pi;
        SampleRecord rec;
        rec.t = t;
        rec.arm = arm;
        rec.context = s.context;
        rec.score = s.score;
        rec.propensity = pi;
        rec.audited = audited;
        if (audited) rec.label = s.label;
        rec.cost = cfg.cost.c_f + (audited ? cfg.cost.c_y : 0.0);
        states[arm].update(rec);
        proxy.observe(rec);
        ++result.n_pulls;
        if (audited) ++result.n_audits;
        result.total_cost += rec.cost;
        if (log) log->push_back(std::move(rec));
    }

    void pull_fixed(int arm, std::int64_t t, double pi) {
        const RoundSample s = sample_round(env, arm, rng);
        record(arm, t, s, pi);
    }

    // Propensity is assigned after the judge score is observed (the policy
    // may condition on it) and always before the audit coin.
    void pull_policy(int arm, std::int64_t t, double gap, double lambda) {
        const RoundSample s = sample_round(env, arm, rng);
        const double pi = propensity(policy, proxy, arm, s.score, gap, lambda);
        record(arm, t, s, pi);
    }

    std::vector<ConfidenceInterval> intervals() const {
        std::vector<ConfidenceInterval> out(states.size());
        for (std::size_t k = 0; k < states.size(); ++k)
            out[k] = confidence_interval(states[k], budget, cfg.pi_min);
        return out;
    }

    void check_coverage(const std::vector<ConfidenceInterval>& ivs) {
        if (!result.covered) return;
        for (int k = 0; k < env.num_arms(); ++k)
            if (env.arm_means[k] < ivs[k].lower || env.arm_means[k] > ivs[k].upper) {
                result.covered = false;
                return;
            }
    }

    TrialResult run() {
        const int best = env.best_arm();

        double init_pi;
        switch (policy.kind) {
            case PolicyKind::always: init_pi = 1.0; break;
            case PolicyKind::never: init_pi = 0.0; break;
            default:
                init_pi = cfg.init_audit_at_floor ? cfg.pi_min : std::max(policy.rho, cfg.pi_min);
        }
        for (int k = 0; k < env.num_arms(); ++k)
            for (int i = 0; i < cfg.n_init; ++i) pull_fixed(k, 0, init_pi);

        const bool solve_budget = policy.budgeted() && policy.kind != PolicyKind::uniform;
        for (std::int64_t t = 1; t <= cfg.t_max; ++t) {
            const auto ivs = intervals();
            check_coverage(ivs);
            const auto [b, c] = select_candidates(states, ivs);
            if (should_stop(ivs, b)) {
                result.selected_arm = b;
                result.stop_round = t - 1;
                result.termination = Termination::stopped;
                return finish(best);
            }
            const double gap = states[b].point_estimate() - states[c].point_estimate();
            double lambda = 0.0;
            if (solve_budget) {
                const std::vector<double> scores{budget_score(policy, proxy, b, gap),
                                                 budget_score(policy, proxy, c, gap)};
                lambda = solve_lambda(scores, policy.rho, policy.pi_min);
            }
            pull_policy(b, t, gap, lambda);
            pull_policy(c, t, gap, lambda);
        }

        // Round cap reached: score the rule once more on the final state,
        // then report the current leader either way.
        const auto ivs = intervals();
        check_coverage(ivs);
        const auto [b, c] = select_candidates(states, ivs);
        (void)c;
        result.selected_arm = b;
        result.stop_round = cfg.t_max;
        result.termination =
            should_stop(ivs, b) ? Termination::stopped : Termination::budget_exhausted;
        return finish(best);
    }

    TrialResult finish(int best) {
        result.correct = result.selected_arm == best;
        result.audit_rate = result.n_pulls > 0
                                ? static_cast<double>(result.n_audits) /
                                      static_cast<double>(result.n_pulls)
                                : 0.0;
        return result;
    }
};

}  // namespace

void EngineConfig::validate(int num_arms) const {
    if (num_arms < 2)
        throw std::invalid_argument("EngineConfig: need at least two arms");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("EngineConfig: delta must lie in (0,1)");
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("EngineConfig: pi_min must lie in (0,1]");
    if (n_init < 1)
        throw std::invalid_argument("EngineConfig: need at least one warm-start pull per arm");
    if (t_max < static_cast<std::int64_t>(num_arms) * n_init)
        throw std::invalid_argument("EngineConfig: t_max below the warm-start budget");
    cost.validate();
}

std::pair<int, int> select_candidates(const std::vector<ArmState>& states,
                                      const std::vector<ConfidenceInterval>& intervals) {
    if (states.size() < 2 || states.size() != intervals.size())
        throw std::invalid_argument("select_candidates: need matching states and intervals, K >= 2");
    int leader = 0;
    double best_mean = states[0].point_estimate();
    for (int k = 1; k < static_cast<int>(states.size()); ++k) {
        const double mean = states[k].point_estimate();
        if (mean > best_mean) {
            leader = k;
            best_mean = mean;
        }
    }
    int challenger = -1;
    double best_upper = 0.0;
    for (int k = 0; k < static_cast<int>(states.size()); ++k) {
        if (k == leader) continue;
        if (challenger < 0 || intervals[k].upper > best_upper) {
            challenger = k;
            best_upper = intervals[k].upper;
        }
    }
    return {leader, challenger};
}

bool should_stop(const std::vector<ConfidenceInterval>& intervals, int leader) {
    if (leader < 0 || leader >= static_cast<int>(intervals.size()))
        throw std::invalid_argument("should_stop: leader index out of range");
    const double floor = intervals[leader].lower;
    for (int k = 0; k < static_cast<int>(intervals.size()); ++k) {
        if (k == leader) continue;
        if (intervals[k].upper >= floor) return false;
    }
    return true;
}

TrialResult run_trial(const EnvironmentSpec& env, const EngineConfig& cfg,
                      const AuditPolicyConfig& policy, std::uint64_t seed,
                      const std::vector<double>& oracle_g, std::vector<SampleRecord>* log) {
    env.validate();
    cfg.validate(env.num_arms());
    policy.validate();
    if (policy.kind == PolicyKind::never && !cfg.allow_positivity_violation)
        throw std::invalid_argument(
            "run_trial: the never policy violates positivity; enable "
            "allow_positivity_violation to run it as a diagnostic");
    if (policy.kind != PolicyKind::never && policy.pi_min != cfg.pi_min)
        throw std::invalid_argument("run_trial: policy and engine disagree on pi_min");
    if (policy.kind == PolicyKind::oracle &&
        oracle_g.size() != static_cast<std::size_t>(env.num_arms()))
        throw std::invalid_argument("run_trial: oracle policy needs one reference variance per arm");

    TrialRunner runner(env, cfg, policy, seed, oracle_g, log);
    return runner.run();
}

}  // namespace ppbai
