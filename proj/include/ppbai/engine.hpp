#pragma once
// Fixed-confidence best-arm identification over judge scores with selective
// audits.  Each decision round recomputes every arm's anytime interval from
// its running sums, picks the leader b (highest point estimate) and the
// challenger c (highest upper bound among the rest), and stops as soon as
// the leader's lower bound strictly clears every rival's upper bound.
// Until then it pulls both b and c, paying c_f per pull and c_y per audit,
// with audit propensities assigned by the configured policy (budgeted
// policies re-solve their multiplier over the candidate pair each round).
//
// A trial consumes a single seeded RNG stream in a fixed order — per pull:
// environment draws, then one uniform for the audit coin (drawn even when
// the propensity is 0 or 1, keeping streams aligned across policies) — so
// identical (environment, config, seed) replays bit-identically.

#include <cstdint>
#include <utility>
#include <vector>

#include "ppbai/allocator.hpp"
#include "ppbai/environment.hpp"
#include "ppbai/estimator.hpp"

namespace ppbai {

enum class Termination { stopped, budget_exhausted };

struct EngineConfig {
    double delta = 0.05;   // global error budget, split evenly across arms
    double pi_min = 0.05;  // positivity floor, also used by the interval widths
    int n_init = 5;        // warm-start pulls per arm
    std::int64_t t_max = 20000;  // decision-round cap
    CostModel cost{};
    // Warm-start audit propensity is max(rho, pi_min); set this for the
    // floor-only variant (audit warm-start pulls with probability pi_min).
    bool init_audit_at_floor = false;
    // The never policy breaks the positivity assumption its intervals rely
    // on; it only runs as an explicitly acknowledged diagnostic baseline.
    bool allow_positivity_violation = false;

    void validate(int num_arms) const;
};

struct TrialResult {
    int selected_arm = -1;
    std::int64_t stop_round = 0;  // completed decision rounds (warm start excluded)
    std::int64_t n_pulls = 0;
    std::int64_t n_audits = 0;
    double total_cost = 0.0;
    double audit_rate = 0.0;  // n_audits / n_pulls
    bool correct = false;
    bool covered = true;  // every arm's interval contained its true mean at every round
    Termination termination = Termination::stopped;
};

// Leader = argmax point estimate, challenger = argmax upper bound among the
// rest; ties break to the lowest arm index.
std::pair<int, int> select_candidates(const std::vector<ArmState>& states,
                                      const std::vector<ConfidenceInterval>& intervals);

// Stop iff the leader's lower bound strictly exceeds every rival's upper bound.
bool should_stop(const std::vector<ConfidenceInterval>& intervals, int leader);

// One complete trial.  `oracle_g` supplies per-arm reference residual second
// moments (required by PolicyKind::oracle, ignored otherwise).  When `log`
// is non-null every pull is appended to it as a SampleRecord.
TrialResult run_trial(const EnvironmentSpec& env, const EngineConfig& cfg,
                      const AuditPolicyConfig& policy, std::uint64_t seed,
                      const std::vector<double>& oracle_g = {},
                      std::vector<SampleRecord>* log = nullptr);

}  // namespace ppbai
