#include <doctest.h>

#include <cmath>

#include "brute.hpp"
#include "gammamodel/envs.hpp"
#include "gammamodel/oracle.hpp"
#include "gammamodel/value_expansion.hpp"

using namespace gm;

TEST_CASE("q_from_model basics") {
    Rng rng(1);
    const GammaModelTable uniform(4, 2, 0.5);
    const std::vector<double> zeros(4, 0.0);
    CHECK(q_from_model(uniform, zeros, 0, 0) == 0.0);

    const std::vector<double> constant(4, 3.0);
    CHECK(q_from_model(uniform, constant, 1, 1) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("q_from_model on the exact occupancy equals policy evaluation") {
    Rng rng(2);
    const TabularMdp mdp = random_mdp(7, 3, rng);
    const PolicyTable policy = random_policy(7, 3, rng);
    const double gamma = 0.8;
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, gamma));
    const PolicyEvaluation values = policy_evaluation(mdp, policy, gamma);
    for (int s = 0; s < 7; ++s)
        for (int a = 0; a < 3; ++a)
            CHECK(std::abs(q_from_model(model, mdp.reward, s, a) - values.q(s, a)) <= 1e-9);
}

TEST_CASE("mve_estimate telescopes with exact inputs") {
    Rng rng(3);
    const TabularMdp mdp = random_mdp(6, 2, rng);
    const PolicyTable policy = random_policy(6, 2, rng);
    const double tilde = 0.9;
    const PolicyEvaluation values = policy_evaluation(mdp, policy, tilde);
    for (int s = 0; s < 6; ++s) {
        CHECK(mve_estimate(mdp, policy, values.v, s, 0, tilde) == values.v[s]);
        for (const int horizon : {1, 3, 10})
            CHECK(std::abs(mve_estimate(mdp, policy, values.v, s, horizon, tilde) -
                           values.v[s]) <= 1e-9);
    }
}

TEST_CASE("mve_estimate with a zero value function is the expected reward") {
    Rng rng(4);
    const TabularMdp mdp = random_mdp(5, 2, rng);
    const PolicyTable policy = random_policy(5, 2, rng);
    const std::vector<double> zeros(5, 0.0);
    const Matrix kernel = policy_transition_matrix(mdp, policy);
    for (int s = 0; s < 5; ++s) {
        double expected = 0.0;
        for (int j = 0; j < 5; ++j) expected += kernel(s, j) * mdp.reward[j];
        CHECK(mve_estimate(mdp, policy, zeros, s, 1, 0.9) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("model-driven mve matches the kernel-driven form for an exact model") {
    Rng rng(5);
    const TabularMdp mdp = random_mdp(6, 2, rng);
    const PolicyTable policy = random_policy(6, 2, rng);
    const GammaModelTable model =
        GammaModelTable::from_probabilities(6, 2, 0.0, mdp.transition);
    const std::vector<double> v(6, 0.25);
    for (int s = 0; s < 6; ++s)
        for (const int horizon : {0, 1, 4})
            CHECK(std::abs(mve_estimate(model, policy, mdp.reward, v, s, horizon, 0.9) -
                           mve_estimate(mdp, policy, v, s, horizon, 0.9)) <= 1e-12);
}

TEST_CASE("the probabilistic-horizon expansion is exact with exact inputs") {
    Rng rng(6);
    for (int trial = 0; trial < 3; ++trial) {
        const TabularMdp mdp = random_mdp(10, 2, rng);
        const PolicyTable policy = random_policy(10, 2, rng);
        const double tilde = 0.95;
        const PolicyEvaluation values = policy_evaluation(mdp, policy, tilde);
        for (const double gamma : {0.0, 0.5, 0.8}) {
            const GammaModelTable model =
                GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, gamma));
            for (int horizon = 1; horizon <= 20; ++horizon)
                for (int s = 0; s < 10; ++s) {
                    const ValueEstimate estimate = gamma_mve_estimate(
                        model, policy, mdp.reward, values.v, s, horizon, tilde);
                    CHECK(std::abs(estimate.value - values.v[s]) <= 1e-8);
                    CHECK(std::abs(estimate.value - estimate.model_term -
                                   estimate.terminal_term) <= 1e-12);
                }
        }
    }
}

TEST_CASE("the expansion is exact on the gridworld as well") {
    const GridworldMdp grid = gridworld_mdp(5);
    const PolicyTable policy = PolicyTable::uniform(25, 4);
    const double tilde = 0.95;
    const PolicyEvaluation values = policy_evaluation(grid.mdp, policy, tilde);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(grid.mdp, policy, 0.8));
    for (int horizon = 1; horizon <= 20; ++horizon)
        for (int s = 0; s < 25; ++s)
            CHECK(std::abs(
                      gamma_mve_estimate(model, policy, grid.mdp.reward, values.v, s, horizon,
                                         tilde)
                          .value -
                      values.v[s]) <= 1e-8);
}

TEST_CASE("a gamma-0 expansion collapses to standard MVE") {
    Rng rng(7);
    const TabularMdp mdp = random_mdp(8, 2, rng);
    const PolicyTable policy = random_policy(8, 2, rng);
    const GammaModelTable model =
        GammaModelTable::from_probabilities(8, 2, 0.0, mdp.transition);
    std::vector<double> v(8);
    for (double& value : v) value = 2.0 * rng.uniform() - 1.0;
    for (const int horizon : {1, 3, 7})
        for (int s = 0; s < 8; ++s) {
            const double expansion =
                gamma_mve_estimate(model, policy, mdp.reward, v, s, horizon, 0.9).value;
            const double standard =
                mve_estimate(model, policy, mdp.reward, v, s, horizon, 0.9);
            CHECK(std::abs(expansion - standard) <= 1e-12);
        }
}

TEST_CASE("with a zero terminal value the expansion approaches the oracle") {
    Rng rng(8);
    const TabularMdp mdp = random_mdp(9, 2, rng);
    const PolicyTable policy = random_policy(9, 2, rng);
    const double gamma = 0.5;
    const double tilde = 0.9;
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, gamma));
    const PolicyEvaluation values = policy_evaluation(mdp, policy, tilde);
    const std::vector<double> zeros(9, 0.0);
    const int horizon = steps_to_mass(gamma, tilde, 1.0 - 1e-10);
    for (int s = 0; s < 9; ++s) {
        const ValueEstimate estimate =
            gamma_mve_estimate(model, policy, mdp.reward, zeros, s, horizon, tilde);
        CHECK(std::abs(estimate.value - values.v[s]) <= 1e-8);
    }
}

TEST_CASE("a uniform shift of the terminal values moves the estimate by the tail weight") {
    Rng rng(9);
    const TabularMdp mdp = random_mdp(6, 2, rng);
    const PolicyTable policy = random_policy(6, 2, rng);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.6));
    const PolicyEvaluation values = policy_evaluation(mdp, policy, 0.9);
    const double epsilon = 0.37;
    std::vector<double> corrupted(values.v);
    for (double& value : corrupted) value += epsilon;
    for (const int horizon : {1, 4, 9}) {
        const double weight = terminal_weight(0.6, 0.9, horizon);
        for (int s = 0; s < 6; ++s) {
            const double clean =
                gamma_mve_estimate(model, policy, mdp.reward, values.v, s, horizon, 0.9).value;
            const double shifted =
                gamma_mve_estimate(model, policy, mdp.reward, corrupted, s, horizon, 0.9).value;
            CHECK(std::abs((shifted - clean) - weight * epsilon) <= 1e-10);
        }
    }
}

TEST_CASE("terminal weight special cases and independent agreement") {
    CHECK(terminal_weight(0.0, 0.9, 7) == doctest::Approx(std::pow(0.9, 7)).epsilon(1e-13));
    CHECK(terminal_weight(0.8, 0.99, 1) == doctest::Approx(0.95).epsilon(1e-13));
    for (const int horizon : {1, 2, 10}) CHECK(terminal_weight(0.7, 0.7, horizon) == 0.0);

    for (int gi = 0; gi <= 9; ++gi) {
        const double gamma = gi / 10.0;
        for (const double tilde : {gamma, 0.95, 0.99}) {
            if (tilde < gamma) continue;
            for (const int horizon : {1, 13, 100}) {
                const RolloutWeights weights = rollout_weights(gamma, tilde, horizon);
                double sum = 0.0;
                for (const double alpha : weights.alphas) sum += alpha;
                CHECK(std::abs((1.0 - sum) - terminal_weight(gamma, tilde, horizon)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("weight budget: model weights plus terminal weight sum to one") {
    const RolloutWeights weights = rollout_weights(0.8, 0.99, 25);
    double sum = 0.0;
    for (const double alpha : weights.alphas) sum += alpha;
    CHECK(std::abs(sum + weights.tail_mass - 1.0) <= 1e-12);
}

TEST_CASE("effective horizon matches the published pairing") {
    const EffectiveHorizon match = effective_horizon_match(0.8, 0.99, 1);
    CHECK(!match.infinite);
    CHECK(match.real_horizon == doctest::Approx(std::log(0.95) / std::log(0.99)).epsilon(1e-12));
    CHECK(match.rounded == 5);
    // terminal weights at the matched horizons agree within 2%
    CHECK(std::abs(std::pow(0.99, 5) - 0.95) <= 0.002);
}

TEST_CASE("effective horizon degenerate cases") {
    const EffectiveHorizon same = effective_horizon_match(0.0, 0.9, 6);
    CHECK(same.rounded == 6);
    CHECK(effective_horizon_match(0.9, 0.9, 3).infinite);
}

TEST_CASE("the sampled expansion is unbiased for the expected one") {
    TabularMdp mdp = swap_chain_mdp();
    mdp.reward = {0.1, 0.8};
    const PolicyTable policy = PolicyTable::uniform(2, 1);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.5));
    std::vector<double> v = {0.3, -0.2};
    const ValueEstimate expected =
        gamma_mve_estimate(model, policy, mdp.reward, v, 0, 3, 0.9);
    Rng rng(10);
    double mean = 0.0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i)
        mean += gamma_mve_estimate_sampled(model, policy, mdp.reward, v, 0, 3, 0.9, rng).value;
    mean /= trials;
    CHECK(std::abs(mean - expected.value) <= 0.01);
}

TEST_CASE("expansion rejects invalid horizons and discount order") {
    const GammaModelTable model(3, 1, 0.5);
    const PolicyTable policy = PolicyTable::uniform(3, 1);
    const std::vector<double> zeros(3, 0.0);
    CHECK_THROWS_AS(gamma_mve_estimate(model, policy, zeros, zeros, 0, 0, 0.9),
                    std::invalid_argument);
    CHECK_THROWS_AS(gamma_mve_estimate(model, policy, zeros, zeros, 0, 1, 0.3),
                    std::invalid_argument);
}
