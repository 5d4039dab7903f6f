#include "ppbai/environment.hpp"

#include <algorithm>
#include <cmath>

namespace ppbai {

namespace {

double clip01(double x) { return std::min(std::max(x, 0.0), 1.0); }

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

int unique_argmax(const std::vector<double>& values) {
    const auto it = std::max_element(values.begin(), values.end());
    const int best = static_cast<int>(it - values.begin());
    for (int k = 0; k < static_cast<int>(values.size()); ++k)
        if (k != best && values[k] == *it)
            throw std::invalid_argument("best_arm: tied arm means, no unique best arm");
    return best;
}

}  // namespace

void EnvironmentSpec::validate() const {
    if (arm_means.empty())
        throw std::invalid_argument("EnvironmentSpec: need at least one arm");
    for (double theta : arm_means)
        if (!(theta >= 0.0 && theta <= 1.0))
            throw std::invalid_argument("EnvironmentSpec: arm means must lie in [0,1]");
    if (segment_probs.empty())
        throw std::invalid_argument("EnvironmentSpec: need at least one context segment");
    double total = 0.0;
    for (double p : segment_probs) {
        if (!(p >= 0.0))
            throw std::invalid_argument("EnvironmentSpec: segment probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("EnvironmentSpec: segment probabilities must sum to 1");
    if (bias.size() != arm_means.size())
        throw std::invalid_argument("EnvironmentSpec: one bias row per arm required");
    for (const auto& row : bias)
        if (row.size() != segment_probs.size())
            throw std::invalid_argument("EnvironmentSpec: one bias entry per segment required");
    if (!(noise_sd >= 0.0))
        throw std::invalid_argument("EnvironmentSpec: noise_sd must be nonnegative");
}

int EnvironmentSpec::best_arm() const { return unique_argmax(arm_means); }

EnvironmentSpec default_instance() { return gap_instance(0.1); }

EnvironmentSpec gap_instance(double gap) {
    if (!(gap > 0.0 && gap <= 0.4))
        throw std::invalid_argument("gap_instance: gap must lie in (0, 0.4]");
    EnvironmentSpec spec;
    spec.arm_means = {0.6 + gap, 0.6, 0.5, 0.4};
    spec.bias.assign(4, {0.1});
    spec.segment_probs = {1.0};
    spec.noise_sd = 0.15;
    spec.outcome = OutcomeModel::bernoulli;
    return spec;
}

RoundSample sample_round(const EnvironmentSpec& spec, int arm, std::mt19937_64& rng) {
    if (arm < 0 || arm >= spec.num_arms())
        throw std::invalid_argument("sample_round: arm index out of range");
    RoundSample out;
    if (spec.segment_probs.size() > 1) {
        const double u = uniform01(rng);
        double cum = 0.0;
        out.context = static_cast<int>(spec.segment_probs.size()) - 1;
        for (int s = 0; s < static_cast<int>(spec.segment_probs.size()); ++s) {
            cum += spec.segment_probs[s];
            if (u < cum) {
                out.context = s;
                break;
            }
        }
    }
    const double theta = spec.arm_means[arm];
    out.label = (spec.outcome == OutcomeModel::bernoulli)
                    ? (uniform01(rng) < theta ? 1.0 : 0.0)
                    : theta;
    double eps = 0.0;
    if (spec.noise_sd > 0.0)
        eps = std::normal_distribution<double>(0.0, spec.noise_sd)(rng);
    out.score = clip01(out.label + spec.bias[arm][out.context] + eps);
    return out;
}

void JointTableInstance::validate() const {
    if (arms.empty())
        throw std::invalid_argument("JointTableInstance: need at least one arm");
    for (const auto& rows : arms) {
        if (rows.empty())
            throw std::invalid_argument("JointTableInstance: arm with empty table");
        double total = 0.0;
        for (const auto& cell : rows) {
            if (!(cell.prob >= 0.0))
                throw std::invalid_argument("JointTableInstance: negative cell probability");
            if (!(cell.score >= 0.0 && cell.score <= 1.0) ||
                !(cell.label >= 0.0 && cell.label <= 1.0))
                throw std::invalid_argument("JointTableInstance: cell values must lie in [0,1]");
            total += cell.prob;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("JointTableInstance: cell probabilities must sum to 1");
    }
}

double JointTableInstance::theta(int arm) const {
    if (arm < 0 || arm >= num_arms())
        throw std::invalid_argument("JointTableInstance: arm index out of range");
    double mean = 0.0;
    for (const auto& cell : arms[arm]) mean += cell.prob * cell.label;
    return mean;
}

int JointTableInstance::best_arm() const {
    std::vector<double> means(arms.size());
    for (int k = 0; k < num_arms(); ++k) means[k] = theta(k);
    return unique_argmax(means);
}

RoundSample sample_round(const JointTableInstance& inst, int arm, std::mt19937_64& rng) {
    if (arm < 0 || arm >= inst.num_arms())
        throw std::invalid_argument("sample_round: arm index out of range");
    const double u = uniform01(rng);
    const auto& rows = inst.arms[arm];
    double cum = 0.0;
    const auto* cell = &rows.back();
    for (const auto& row : rows) {
        cum += row.prob;
        if (u < cum) {
            cell = &row;
            break;
        }
    }
    return RoundSample{0, cell->score, cell->label};
}

std::pair<JointTableInstance, JointTableInstance> indistinguishable_pair() {
    using Cell = JointTableInstance::Cell;
    const std::vector<Cell> strong{{0.0, 0.2, 0.5}, {1.0, 1.0, 0.5}};  // theta 0.6
    const std::vector<Cell> weak{{0.0, 0.0, 0.5}, {1.0, 0.8, 0.5}};    // theta 0.4
    JointTableInstance first{{strong, weak}};
    JointTableInstance second{{weak, strong}};
    return {first, second};
}

double residual_second_moment(const JointTableInstance& inst, int arm) {
    if (arm < 0 || arm >= inst.num_arms())
        throw std::invalid_argument("residual_second_moment: arm index out of range");
    double g = 0.0;
    for (const auto& cell : inst.arms[arm]) {
        const double d = cell.label - cell.score;
        g += cell.prob * d * d;
    }
    return g;
}

McEstimate residual_second_moment(const EnvironmentSpec& spec, int arm,
                                  std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 2)
        throw std::invalid_argument("residual_second_moment: need at least two samples");
    std::mt19937_64 rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const RoundSample s = sample_round(spec, arm, rng);
        const double d2 = (s.label - s.score) * (s.label - s.score);
        sum += d2;
        sum_sq += d2 * d2;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return McEstimate{mean, std::sqrt(var / n)};
}

}  // namespace ppbai
