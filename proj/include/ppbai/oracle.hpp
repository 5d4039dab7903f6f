#pragma once
// Independent reference computations used by the test suite to check the
// production estimators and policies against ground truth: exact moment
// enumeration for table instances, closed-form moments for the clipped
// Gaussian judge, exhaustive grid search for the audit allocation, and a
// shared-seed demonstration that score-only learners cannot separate
// instances with identical score marginals.  Test-support code: linked by
// the tests, never by the library or CLI paths.

#include <cstdint>
#include <utility>
#include <vector>

#include "ppbai/environment.hpp"

namespace ppbai::oracle {

struct ArmMoments {
    double theta = 0.0;     // E[y]
    double mu_score = 0.0;  // E[f]
    double mu_resid = 0.0;  // E[y - f]
    double g = 0.0;         // E[(y - f)^2]
};

// Exact enumeration over a table instance's cells.
ArmMoments exact_arm_stats(const JointTableInstance& inst, int arm);

// Closed-form moments for f = clip(y + bias + eps, 0, 1), eps ~ N(0, sd^2),
// with y ~ Bernoulli(theta) or y = theta, via Gaussian partial moments.
ArmMoments clipped_judge_stats(double theta, double bias, double noise_sd,
                               OutcomeModel outcome = OutcomeModel::bernoulli);

struct GridSearchResult {
    std::vector<double> pis;
    double objective = 0.0;  // sum_i g_i / pi_i at the grid optimum
};

// Exhaustive search over per-stratum propensities pi_i in
// {pi_min, pi_min + step, ...} with the final stratum solved exactly so the
// mean equals rho.  Intended for small instances (<= 4 strata); throws when
// no grid assignment satisfies the budget.
GridSearchResult grid_optimal_policy(const std::vector<double>& g_values, double rho,
                                     double pi_min, double step);

enum class JudgeOnlyRule {
    mean_argmax,         // pick the arm with the highest overall score mean
    second_half_argmax,  // same, restricted to the later half of the pulls
};

struct JudgeOnlyErrors {
    double error_first = 0.0;   // P(chosen != best arm of the first instance)
    double error_second = 0.0;  // same for the second instance
};

// Runs a score-only learner (round-robin pulls, label never observed) on two
// instances under shared per-trial seeds.  When the instances' score
// marginals coincide the learner's choice is identical on both, so the two
// error rates sum to one exactly — whichever rule is used.
JudgeOnlyErrors judge_only_error_rate(const JointTableInstance& first,
                                      const JointTableInstance& second, JudgeOnlyRule rule,
                                      int n_trials, std::int64_t horizon, std::uint64_t seed);

}  // namespace ppbai::oracle
