#pragma once
// Synthetic environments for score-and-audit bandit experiments.
//
// Generative form: each pull of arm k draws a context segment x, a latent
// ground-truth label y, and a judge score
//
//   f = clip(y + bias_k(x) + eps, 0, 1),  eps ~ N(0, noise_sd^2)
//
// so the judge is a systematically biased, noisy, range-clipped reading of
// the label.  Tabular form: a small joint table over (score, label) pairs
// per arm, used to build instance pairs whose score marginals are identical
// while the label conditionals differ — no score-only learner can tell the
// instances apart, audits can.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ppbai {

struct CostModel {
    double c_f = 1.0;   // charged per pull (judge score)
    double c_y = 20.0;  // charged per audited pull (ground-truth label)

    void validate() const {
        if (!(c_f >= 0.0) || !(c_y >= 0.0))
            throw std::invalid_argument("CostModel: costs must be nonnegative");
    }
};

enum class OutcomeModel {
    bernoulli,      // y ~ Bernoulli(theta_k)
    deterministic,  // y = theta_k exactly (useful to expose the bias alone)
};

struct RoundSample {
    int context = 0;
    double score = 0.0;
    double label = 0.0;
};

struct EnvironmentSpec {
    std::vector<double> arm_means;            // theta_k in [0,1]
    std::vector<std::vector<double>> bias;    // bias[arm][segment]
    std::vector<double> segment_probs{1.0};   // context distribution
    double noise_sd = 0.15;
    OutcomeModel outcome = OutcomeModel::bernoulli;

    int num_arms() const { return static_cast<int>(arm_means.size()); }
    void validate() const;
    int best_arm() const;  // unique argmax of arm_means; throws on a tie
};

// Four-arm default: theta = (0.7, 0.6, 0.5, 0.4), every arm judged with the
// same +0.1 bias and 0.15 noise, Bernoulli labels, single context segment.
EnvironmentSpec default_instance();

// Same shape with a tunable top gap: theta = (0.6 + gap, 0.6, 0.5, 0.4).
EnvironmentSpec gap_instance(double gap);

// One pull of `arm`.  Consumes draws from `rng` in a fixed order: context
// (only when there are multiple segments), label (only when stochastic),
// then judge noise.  Identical (spec, seed) replays bit-identically.
RoundSample sample_round(const EnvironmentSpec& spec, int arm, std::mt19937_64& rng);

struct JointTableInstance {
    struct Cell {
        double score;
        double label;
        double prob;
    };
    std::vector<std::vector<Cell>> arms;  // rows per arm, score-ascending

    int num_arms() const { return static_cast<int>(arms.size()); }
    void validate() const;
    double theta(int arm) const;  // exact E[label] by enumeration
    int best_arm() const;
};

// One pull of `arm`: a single uniform draw selects a table row.  Instances
// whose tables list the same score values in the same row order therefore
// produce identical score streams under a shared seed.
RoundSample sample_round(const JointTableInstance& inst, int arm, std::mt19937_64& rng);

// Two 2-arm table instances with identical Bernoulli(1/2) score marginals
// everywhere but swapped label tables, so the best arm flips between them:
// theta = (0.6, 0.4) in the first and (0.4, 0.6) in the second.
std::pair<JointTableInstance, JointTableInstance> indistinguishable_pair();

// E[(y - f)^2 | arm]: exact enumeration for table instances.
double residual_second_moment(const JointTableInstance& inst, int arm);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// E[(y - f)^2 | arm] for generative environments by seeded Monte Carlo.
McEstimate residual_second_moment(const EnvironmentSpec& spec, int arm,
                                  std::int64_t n_samples, std::uint64_t seed);

}  // namespace ppbai
