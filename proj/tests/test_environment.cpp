#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "ppbai/environment.hpp"
#include "ppbai/oracle.hpp"

using namespace ppbai;

TEST_CASE("default instance: four arms, uniform judge bias") {
    const auto env = default_instance();
    REQUIRE(env.num_arms() == 4);
    CHECK(env.arm_means == std::vector<double>{0.7, 0.6, 0.5, 0.4});
    for (const auto& row : env.bias) CHECK(row == std::vector<double>{0.1});
    CHECK(env.noise_sd == 0.15);
    CHECK(env.best_arm() == 0);
    CHECK_NOTHROW(env.validate());
}

TEST_CASE("gap instance tunes only the top arm") {
    CHECK(gap_instance(0.15).arm_means == std::vector<double>{0.75, 0.6, 0.5, 0.4});
    CHECK(gap_instance(0.4).arm_means == std::vector<double>{1.0, 0.6, 0.5, 0.4});
    CHECK_THROWS_AS(gap_instance(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gap_instance(0.45), std::invalid_argument);
    CHECK_THROWS_AS(gap_instance(-0.1), std::invalid_argument);
}

TEST_CASE("spec validation rejects malformed environments") {
    auto env = default_instance();
    env.arm_means[0] = 1.2;
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    env = default_instance();
    env.segment_probs = {0.5, 0.4};
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    env = default_instance();
    env.bias.pop_back();
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    env = default_instance();
    env.bias[2] = {0.1, 0.1};  // two entries, one segment
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    env = default_instance();
    env.noise_sd = -0.01;
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    env = default_instance();
    env.arm_means = {0.5, 0.5, 0.3, 0.2};
    CHECK_THROWS_AS(env.best_arm(), std::invalid_argument);

    const CostModel bad_cost{-1.0, 20.0};
    CHECK_THROWS_AS(bad_cost.validate(), std::invalid_argument);
}

TEST_CASE("scores are clipped to the unit interval, labels are Bernoulli") {
    const auto env = default_instance();
    std::mt19937_64 rng(2024);
    double label_sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_round(env, 0, rng);
        REQUIRE(s.score >= 0.0);
        REQUIRE(s.score <= 1.0);
        REQUIRE((s.label == 0.0 || s.label == 1.0));
        label_sum += s.label;
    }
    // SE of the mean is ~0.0014; 0.005 is a 3.5-sigma band.
    CHECK(std::abs(label_sum / n - 0.7) < 0.005);
}

TEST_CASE("same seed replays the identical stream") {
    const auto env = default_instance();
    std::mt19937_64 a(99), b(99);
    for (int i = 0; i < 500; ++i) {
        const auto sa = sample_round(env, i % 4, a);
        const auto sb = sample_round(env, i % 4, b);
        CHECK(sa.score == sb.score);
        CHECK(sa.label == sb.label);
        CHECK(sa.context == sb.context);
    }
}

// The draw order is part of the contract (policies are compared on paired
// seeds): context only when there are multiple segments, label only when
// stochastic, then judge noise.  Replicate it draw by draw.
TEST_CASE("documented draw order: label uniform, then judge noise") {
    auto env = default_instance();  // bernoulli, one segment
    std::mt19937_64 rng(123), mirror(123);

    const auto s = sample_round(env, 0, rng);
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(mirror);
    const double expected_label = u < 0.7 ? 1.0 : 0.0;
    const double eps = std::normal_distribution<double>(0.0, 0.15)(mirror);
    CHECK(s.label == expected_label);
    CHECK(s.score == std::clamp(expected_label + 0.1 + eps, 0.0, 1.0));
    CHECK(s.context == 0);

    // Both generators must sit at the same position afterwards.
    CHECK(std::uniform_real_distribution<double>(0.0, 1.0)(rng) ==
          std::uniform_real_distribution<double>(0.0, 1.0)(mirror));
}

TEST_CASE("deterministic outcome consumes no label draw") {
    auto env = default_instance();
    env.outcome = OutcomeModel::deterministic;
    std::mt19937_64 rng(123), mirror(123);
    const auto s = sample_round(env, 2, rng);
    const double eps = std::normal_distribution<double>(0.0, 0.15)(mirror);
    CHECK(s.label == 0.5);
    CHECK(s.score == std::clamp(0.5 + 0.1 + eps, 0.0, 1.0));
}

TEST_CASE("noise-free deterministic scores expose the bias exactly") {
    auto env = default_instance();
    env.outcome = OutcomeModel::deterministic;
    env.noise_sd = 0.0;
    std::mt19937_64 rng(5);
    for (int arm = 0; arm < 4; ++arm) {
        const auto s = sample_round(env, arm, rng);
        CHECK(s.label == env.arm_means[arm]);
        CHECK(s.score == env.arm_means[arm] + 0.1);  // unclipped regime
    }
}

TEST_CASE("context segments are drawn with the configured probabilities") {
    EnvironmentSpec env;
    env.arm_means = {0.2, 0.4};
    env.bias = {{0.0, 0.5}, {0.0, 0.5}};
    env.segment_probs = {0.3, 0.7};
    env.noise_sd = 0.0;
    env.outcome = OutcomeModel::deterministic;
    env.validate();

    std::mt19937_64 rng(31);
    int seg1 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_round(env, 0, rng);
        // Score exposes the segment bias exactly: 0.2 or 0.7.
        CHECK(s.score == (s.context == 0 ? 0.2 : 0.7));
        seg1 += s.context;
    }
    CHECK(std::abs(static_cast<double>(seg1) / n - 0.7) < 0.015);
}

TEST_CASE("indistinguishable pair: swapped labels, same score marginals") {
    const auto [first, second] = indistinguishable_pair();
    CHECK_NOTHROW(first.validate());
    CHECK_NOTHROW(second.validate());
    CHECK(first.theta(0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(first.theta(1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(second.theta(0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(second.theta(1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(first.best_arm() == 0);
    CHECK(second.best_arm() == 1);
    for (int arm = 0; arm < 2; ++arm) {
        CHECK(residual_second_moment(first, arm) == doctest::Approx(0.02).epsilon(1e-15));
        CHECK(residual_second_moment(second, arm) == doctest::Approx(0.02).epsilon(1e-15));
    }
}

TEST_CASE("shared seeds give the pair identical score streams") {
    const auto [first, second] = indistinguishable_pair();
    std::mt19937_64 a(7), b(7);
    double label_gap[2] = {0.0, 0.0};
    for (int i = 0; i < 2000; ++i) {
        const int arm = i % 2;
        const auto sa = sample_round(first, arm, a);
        const auto sb = sample_round(second, arm, b);
        CHECK(sa.score == sb.score);  // scores coincide draw by draw
        label_gap[arm] += sa.label - sb.label;
    }
    // Labels must not coincide: swapping the tables shifts each arm's label
    // by exactly 0.2, in opposite directions for the two arms.
    CHECK(label_gap[0] / 1000.0 == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(label_gap[1] / 1000.0 == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("table enumeration agrees with the reference moments") {
    const auto [first, second] = indistinguishable_pair();
    const auto m = oracle::exact_arm_stats(first, 0);
    CHECK(m.theta == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(m.mu_score == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.mu_resid == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(m.g == doctest::Approx(0.02).epsilon(1e-15));
}

// Monte Carlo residual second moments for the generative judge must agree
// with the closed-form clipped-Gaussian reference within sampling error.
TEST_CASE("sampled residual moments match the closed form") {
    const auto env = default_instance();
    for (int arm : {0, 3}) {
        const auto ref = oracle::clipped_judge_stats(env.arm_means[arm], 0.1, 0.15);
        const auto mc = residual_second_moment(env, arm, 400000, 8800 + arm);
        CHECK(std::abs(mc.value - ref.g) < 3.5 * mc.std_error);
    }
}
