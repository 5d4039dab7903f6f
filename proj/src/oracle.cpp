#include "ppbai/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ppbai::oracle {

namespace {

double norm_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }
double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

// E[clip(W, lo, hi)] and E[clip(W, lo, hi)^2] for W ~ N(m, s^2).
double clip_mean(double m, double s, double lo, double hi) {
    if (s == 0.0) return std::clamp(m, lo, hi);
    const double a = (lo - m) / s, b = (hi - m) / s;
    return lo * norm_cdf(a) + hi * (1.0 - norm_cdf(b)) + m * (norm_cdf(b) - norm_cdf(a)) -
           s * (norm_pdf(b) - norm_pdf(a));
}

double clip_sq(double m, double s, double lo, double hi) {
    if (s == 0.0) {
        const double v = std::clamp(m, lo, hi);
        return v * v;
    }
    const double a = (lo - m) / s, b = (hi - m) / s;
    const double mid = m * m * (norm_cdf(b) - norm_cdf(a)) +
                       2.0 * m * s * (norm_pdf(a) - norm_pdf(b)) +
                       s * s * ((norm_cdf(b) - b * norm_pdf(b)) - (norm_cdf(a) - a * norm_pdf(a)));
    return lo * lo * norm_cdf(a) + hi * hi * (1.0 - norm_cdf(b)) + mid;
}

}  // namespace

ArmMoments exact_arm_stats(const JointTableInstance& inst, int arm) {
    if (arm < 0 || arm >= inst.num_arms())
        throw std::invalid_argument("exact_arm_stats: arm index out of range");
    ArmMoments out;
    for (const auto& cell : inst.arms[arm]) {
        out.theta += cell.prob * cell.label;
        out.mu_score += cell.prob * cell.score;
        const double d = cell.label - cell.score;
        out.mu_resid += cell.prob * d;
        out.g += cell.prob * d * d;
    }
    return out;
}

ArmMoments clipped_judge_stats(double theta, double bias, double noise_sd, OutcomeModel outcome) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("clipped_judge_stats: theta must lie in [0,1]");
    if (!(noise_sd >= 0.0))
        throw std::invalid_argument("clipped_judge_stats: noise_sd must be nonnegative");
    ArmMoments out;
    out.theta = theta;
    double mean_d, mean_d_sq;
    if (outcome == OutcomeModel::bernoulli) {
        // Given y = 1: f - y = clip(bias + eps, -1, 0); given y = 0: clip(bias + eps, 0, 1).
        const double d1 = clip_mean(bias, noise_sd, -1.0, 0.0);
        const double d1s = clip_sq(bias, noise_sd, -1.0, 0.0);
        const double d0 = clip_mean(bias, noise_sd, 0.0, 1.0);
        const double d0s = clip_sq(bias, noise_sd, 0.0, 1.0);
        mean_d = theta * d1 + (1.0 - theta) * d0;
        mean_d_sq = theta * d1s + (1.0 - theta) * d0s;
    } else {
        // y = theta exactly: f - y = clip(bias + eps, -theta, 1 - theta).
        mean_d = clip_mean(bias, noise_sd, -theta, 1.0 - theta);
        mean_d_sq = clip_sq(bias, noise_sd, -theta, 1.0 - theta);
    }
    out.mu_score = theta + mean_d;
    out.mu_resid = -mean_d;
    out.g = mean_d_sq;
    return out;
}

GridSearchResult grid_optimal_policy(const std::vector<double>& g_values, double rho,
                                     double pi_min, double step) {
    const int d = static_cast<int>(g_values.size());
    if (d < 1 || d > 4)
        throw std::invalid_argument("grid_optimal_policy: supports 1 to 4 strata");
    for (double g : g_values)
        if (!(g >= 0.0))
            throw std::invalid_argument("grid_optimal_policy: variances must be nonnegative");
    if (!(pi_min > 0.0 && pi_min <= 1.0) || !(rho >= pi_min && rho <= 1.0))
        throw std::invalid_argument("grid_optimal_policy: need 0 < pi_min <= rho <= 1");
    if (!(step > 0.0 && step < 1.0))
        throw std::invalid_argument("grid_optimal_policy: step must lie in (0,1)");

    std::vector<double> grid;
    for (double v = pi_min; v < 1.0; v += step) grid.push_back(v);
    grid.push_back(1.0);

    GridSearchResult best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<double> pis(d);

    // Enumerate the first d-1 strata on the grid; the budget pins the last.
    const double target = rho * d;
    auto consider_last = [&](double partial_sum) {
        const double last = target - partial_sum;
        if (last < pi_min - 1e-12 || last > 1.0 + 1e-12) return;
        pis[d - 1] = std::clamp(last, pi_min, 1.0);
        double obj = 0.0;
        for (int i = 0; i < d; ++i) obj += g_values[i] / pis[i];
        if (obj < best.objective) {
            best.objective = obj;
            best.pis = pis;
        }
    };

    if (d == 1) {
        consider_last(0.0);
    } else {
        std::vector<std::size_t> idx(d - 1, 0);
        while (true) {
            double partial = 0.0;
            for (int i = 0; i < d - 1; ++i) {
                pis[i] = grid[idx[i]];
                partial += pis[i];
            }
            consider_last(partial);
            int pos = d - 2;
            while (pos >= 0 && ++idx[pos] == grid.size()) idx[pos--] = 0;
            if (pos < 0) break;
        }
    }

    if (!std::isfinite(best.objective))
        throw std::invalid_argument("grid_optimal_policy: no grid policy satisfies the budget");
    return best;
}

JudgeOnlyErrors judge_only_error_rate(const JointTableInstance& first,
                                      const JointTableInstance& second, JudgeOnlyRule rule,
                                      int n_trials, std::int64_t horizon, std::uint64_t seed) {
    first.validate();
    second.validate();
    if (first.num_arms() != second.num_arms() || first.num_arms() < 2)
        throw std::invalid_argument("judge_only_error_rate: need matching instances, K >= 2");
    if (n_trials < 1 || horizon < first.num_arms())
        throw std::invalid_argument("judge_only_error_rate: need trials and a usable horizon");

    const int num_arms = first.num_arms();
    const int best_first = first.best_arm();
    const int best_second = second.best_arm();

    auto choose = [&](const JointTableInstance& inst, std::uint64_t trial_seed) {
        std::mt19937_64 rng(trial_seed);
        std::vector<double> sum(num_arms, 0.0), half_sum(num_arms, 0.0);
        std::vector<std::int64_t> n(num_arms, 0), half_n(num_arms, 0);
        for (std::int64_t t = 0; t < horizon; ++t) {
            const int arm = static_cast<int>(t % num_arms);
            const RoundSample s = sample_round(inst, arm, rng);
            sum[arm] += s.score;
            ++n[arm];
            if (t >= horizon / 2) {
                half_sum[arm] += s.score;
                ++half_n[arm];
            }
        }
        int pick = 0;
        double pick_mean = -1.0;
        for (int k = 0; k < num_arms; ++k) {
            const double mean = (rule == JudgeOnlyRule::mean_argmax)
                                    ? sum[k] / static_cast<double>(n[k])
                                    : half_sum[k] / static_cast<double>(std::max<std::int64_t>(half_n[k], 1));
            if (mean > pick_mean) {
                pick = k;
                pick_mean = mean;
            }
        }
        return pick;
    };

    JudgeOnlyErrors out;
    for (int i = 0; i < n_trials; ++i) {
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(i);
        // Both instances are run on their own stream from the same seed; the
        // streams coincide whenever the score marginals do.
        if (choose(first, trial_seed) != best_first) out.error_first += 1.0;
        if (choose(second, trial_seed) != best_second) out.error_second += 1.0;
    }
    out.error_first /= n_trials;
    out.error_second /= n_trials;
    return out;
}

}  // namespace ppbai::oracle
