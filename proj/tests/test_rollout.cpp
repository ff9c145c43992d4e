#include <doctest.h>

#include <cmath>

#include "brute.hpp"
#include "gammamodel/oracle.hpp"
#include "gammamodel/rollout.hpp"

using namespace gm;

TEST_CASE("matched discounts put all weight on the first step") {
    const RolloutWeights weights = rollout_weights(0.7, 0.7, 5);
    CHECK(weights.alphas[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int n = 1; n < 5; ++n) CHECK(weights.alphas[n] == 0.0);
    CHECK(weights.tail_mass == 0.0);
}

TEST_CASE("a single-step model yields geometric weights") {
    const double gt = 0.9;
    const RolloutWeights weights = rollout_weights(0.0, gt, 20);
    for (int n = 1; n <= 20; ++n)
        CHECK(weights.alphas[n - 1] ==
              doctest::Approx((1.0 - gt) * std::pow(gt, n - 1)).epsilon(1e-13));
}

TEST_CASE("flagship weights match direct substitution") {
    const RolloutWeights weights = rollout_weights(0.8, 0.99, 2);
    CHECK(weights.alphas[0] == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(weights.alphas[1] == doctest::Approx(0.0475).epsilon(1e-13));
    CHECK(rollout_weights(0.8, 0.99, 1).tail_mass == doctest::Approx(0.95).epsilon(1e-13));
}

TEST_CASE("weights satisfy the closed form and tail identity across a grid") {
    for (int gi = 0; gi <= 9; ++gi) {
        const double gamma = gi / 10.0;
        for (const double tilde : {gamma, (gamma + 1.0) / 2, 0.99}) {
            if (tilde < gamma || tilde >= 1.0) continue;
            for (const int horizon : {1, 7, 40, 100}) {
                const RolloutWeights weights = rollout_weights(gamma, tilde, horizon);
                double sum = 0.0;
                const double ratio = (tilde - gamma) / (1.0 - gamma);
                for (int n = 1; n <= horizon; ++n) {
                    const double expected = (1.0 - tilde) *
                                            std::pow(tilde - gamma, n - 1) /
                                            std::pow(1.0 - gamma, n);
                    CHECK(std::abs(weights.alphas[n - 1] - expected) <= 1e-14);
                    CHECK(weights.alphas[n - 1] >= 0.0);
                    sum += weights.alphas[n - 1];
                }
                CHECK(sum <= 1.0 + 1e-12);
                CHECK(std::abs(weights.tail_mass - std::pow(ratio, horizon)) <= 1e-12);
                CHECK(std::abs((1.0 - sum) - weights.tail_mass) <= 1e-12);
            }
        }
    }
}

TEST_CASE("rollout_weights rejects invalid discount pairs") {
    CHECK_THROWS_AS(rollout_weights(0.9, 0.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(rollout_weights(0.5, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(rollout_weights(0.5, 0.9, 0), std::invalid_argument);
}

TEST_CASE("negative binomial with one step is geometric") {
    const double gamma = 0.6;
    for (long t = 1; t <= 30; ++t)
        CHECK(negative_binomial_pmf(1, gamma, t) ==
              doctest::Approx(std::pow(gamma, t - 1) * (1.0 - gamma)).epsilon(1e-13));
}

TEST_CASE("negative binomial spot value and support boundary") {
    CHECK(negative_binomial_pmf(2, 0.5, 3) == doctest::Approx(0.25).epsilon(1e-14));
    for (int n = 1; n <= 6; ++n)
        for (long t = 0; t < n; ++t) CHECK(negative_binomial_pmf(n, 0.5, t) == 0.0);
    CHECK(negative_binomial_pmf(3, 0.0, 3) == 1.0);
    CHECK(negative_binomial_pmf(3, 0.0, 4) == 0.0);
}

TEST_CASE("negative binomial matches the Pascal-triangle reference") {
    for (const double gamma : {0.2, 0.5, 0.9}) {
        for (const int n : {1, 2, 5, 17}) {
            for (long t = n; t <= 55; ++t)
                CHECK(std::abs(negative_binomial_pmf(n, gamma, t) -
                               brute::nb_pmf(n, gamma, t)) <= 1e-13);
        }
    }
}

TEST_CASE("negative binomial pmfs normalize under a discount-dependent cutoff") {
    for (const double gamma : {0.3, 0.9}) {
        for (const int n : {1, 2, 5}) {
            double sum = 0.0;
            const long cutoff = 200 + static_cast<long>(20.0 * n / (1.0 - gamma));
            for (long t = n; t <= cutoff; ++t) sum += negative_binomial_pmf(n, gamma, t);
            CHECK(std::abs(sum - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("negative binomial stays finite far into the tail") {
    const double far = negative_binomial_pmf(50, 0.99, 10000);
    CHECK(std::isfinite(far));
    CHECK(far >= 0.0);
    CHECK(negative_binomial_pmf(2, 0.5, 2000) >= 0.0);
}

TEST_CASE("timestep mixture reproduces the geometric pmf up to the horizon") {
    SUBCASE("t = 1 is alpha_1 (1-gamma)") {
        const auto q = timestep_mixture(0.5, 0.9, 10, 1);
        CHECK(q[0] == doctest::Approx(0.1).epsilon(1e-13));
    }
    SUBCASE("full identity across t <= H") {
        const auto q = timestep_mixture(0.5, 0.9, 30, 30);
        for (long t = 1; t <= 30; ++t)
            CHECK(std::abs(q[t - 1] - 0.1 * std::pow(0.9, t - 1)) <= 1e-12);
    }
    SUBCASE("matched discounts give the geometric directly") {
        const auto q = timestep_mixture(0.6, 0.6, 8, 8);
        for (long t = 1; t <= 8; ++t)
            CHECK(std::abs(q[t - 1] - 0.4 * std::pow(0.6, t - 1)) <= 1e-13);
    }
}

TEST_CASE("one model step is the model row") {
    const TabularMdp mdp = swap_chain_mdp();
    const PolicyTable policy = PolicyTable::uniform(2, 1);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.5));
    const auto mu1 = n_step_distribution(model, policy, RolloutStart::from_state_action(0, 0), 1);
    CHECK(brute::tv(mu1, model.probabilities(0, 0)) <= 1e-12);
}

TEST_CASE("single-step models chain into kernel powers") {
    Rng rng(2);
    const TabularMdp mdp = random_mdp(6, 2, rng);
    const PolicyTable policy = random_policy(6, 2, rng);
    const GammaModelTable model =
        GammaModelTable::from_probabilities(6, 2, 0.0, mdp.transition);
    const Matrix kernel = policy_transition_matrix(mdp, policy);
    for (const int n : {1, 2, 5}) {
        const auto mu = n_step_distribution(model, policy, RolloutStart::from_state(0), n);
        const auto expected = brute::kernel_power_row(kernel, 0, n);
        CHECK(brute::tv(mu, expected) <= 1e-10);
    }
}

TEST_CASE("two swap-chain model steps match the hand-computed composition") {
    // mu_1 from state 0 is (1/3, 2/3); composing with U = [[1/3,2/3],[2/3,1/3]]
    // gives mu_2 = (5/9, 4/9), the negative-binomial two-step mixture
    const TabularMdp mdp = swap_chain_mdp();
    const PolicyTable policy = PolicyTable::uniform(2, 1);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.5));
    const auto mu2 = n_step_distribution(model, policy, RolloutStart::from_state(0), 2);
    CHECK(mu2[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-10));
    CHECK(mu2[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-10));

    // cross-check by summing the NB(2, 1-gamma) timestep mixture directly:
    // after t total steps the swap chain sits on state t mod 2
    double even_mass = 0.0;
    double odd_mass = 0.0;
    for (long t = 2; t <= 200; ++t) {
        const double p = brute::nb_pmf(2, 0.5, t);
        if (t % 2 == 0)
            even_mass += p;
        else
            odd_mass += p;
    }
    CHECK(mu2[0] == doctest::Approx(even_mass).epsilon(1e-10));
    CHECK(mu2[1] == doctest::Approx(odd_mass).epsilon(1e-10));
}

TEST_CASE("reweighting an exact model reaches the larger-discount occupancy") {
    Rng rng(3);
    const TabularMdp mdp = random_mdp(10, 2, rng);
    const PolicyTable policy = random_policy(10, 2, rng);
    const double gamma = 0.5;
    const double tilde = 0.9;
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, gamma));
    const OccupancyTable target = exact_occupancy(mdp, policy, tilde);

    // action-conditioned start, horizon large enough for a 1e-10 tail
    const int horizon = steps_to_mass(gamma, tilde, 1.0 - 1e-10);
    const auto result = reweighted_distribution(
        model, policy, RolloutStart::from_state_action(0, 1), tilde, horizon);
    CHECK(result.tail_mass <= 1e-10);
    CHECK(brute::tv(result.distribution, target.row(0, 1)) <= 1e-9);
}

TEST_CASE("truncated reweighting errs by at most the tail mass") {
    Rng rng(4);
    const TabularMdp mdp = random_mdp(8, 2, rng);
    const PolicyTable policy = random_policy(8, 2, rng);
    const double gamma = 0.0;
    const double tilde = 0.9;
    const GammaModelTable model =
        GammaModelTable::from_probabilities(8, 2, gamma, mdp.transition);
    const OccupancyTable target = exact_occupancy(mdp, policy, tilde);
    for (const int horizon : {1, 5, 20, 50}) {
        const auto result = reweighted_distribution(model, policy,
                                                    RolloutStart::from_state_action(2, 0), tilde,
                                                    horizon);
        CHECK(result.tail_mass ==
              doctest::Approx(std::pow(tilde, horizon)).epsilon(1e-12));
        CHECK(brute::tv(result.distribution, target.row(2, 0)) <= result.tail_mass + 1e-10);
    }
}

TEST_CASE("matched-discount reweighting returns the model row with no tail") {
    Rng rng(5);
    const TabularMdp mdp = random_mdp(5, 2, rng);
    const PolicyTable policy = random_policy(5, 2, rng);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.6));
    const auto result =
        reweighted_distribution(model, policy, RolloutStart::from_state_action(1, 1), 0.6, 1);
    CHECK(result.tail_mass == 0.0);
    CHECK(brute::tv(result.distribution, model.probabilities(1, 1)) <= 1e-12);
}

TEST_CASE("steps_to_mass hits the published anchor and the diagonal") {
    CHECK(steps_to_mass(0.0, 0.99, 0.95) == 299);
    for (const double gamma : {0.0, 0.3, 0.8, 0.95}) CHECK(steps_to_mass(gamma, gamma, 0.95) == 1);
}

TEST_CASE("steps_to_mass agrees with a brute-force scan") {
    const auto brute_minimal = [](double gamma, double tilde, double coverage) {
        const double ratio = (tilde - gamma) / (1.0 - gamma);
        int h = 1;
        while (std::pow(ratio, h) > 1.0 - coverage) ++h;
        return h;
    };
    CHECK(steps_to_mass(0.8, 0.99, 0.95) == 59);
    CHECK(steps_to_mass(0.8, 0.99, 0.95) == brute_minimal(0.8, 0.99, 0.95));
    for (int gi = 0; gi <= 9; ++gi)
        for (int ti = gi; ti <= 9; ++ti) {
            const double gamma = gi / 10.0;
            const double tilde = 0.09 + ti / 10.0;
            if (tilde < gamma) continue;
            CHECK(steps_to_mass(gamma, tilde, 0.95) == brute_minimal(gamma, tilde, 0.95));
        }
}

TEST_CASE("steps_to_mass is nonincreasing in the model discount") {
    for (const double tilde : {0.9, 0.99}) {
        int previous = std::numeric_limits<int>::max();
        for (int gi = 0; gi <= 9; ++gi) {
            const double gamma = gi / 10.0;
            if (gamma > tilde) break;
            const int steps = steps_to_mass(gamma, tilde, 0.95);
            CHECK(steps <= previous);
            previous = steps;
        }
    }
}

TEST_CASE("sampled rollouts follow deterministic model rows") {
    const TabularMdp mdp = swap_chain_mdp();
    const PolicyTable policy = PolicyTable::uniform(2, 1);
    const GammaModelTable model =
        GammaModelTable::from_probabilities(2, 1, 0.0, mdp.transition);
    Rng rng(6);
    const auto states = sample_rollout(model, policy, 0, 6, rng);
    const std::vector<int> expected = {1, 0, 1, 0, 1, 0};
    CHECK(states == expected);
}

TEST_CASE("sampled rollouts are reproducible and match the composed kernel") {
    const TabularMdp mdp = swap_chain_mdp();
    const PolicyTable policy = PolicyTable::uniform(2, 1);
    const GammaModelTable model =
        GammaModelTable::from_occupancy(exact_occupancy(mdp, policy, 0.5));

    Rng rng_a(7);
    Rng rng_b(7);
    CHECK(sample_rollout(model, policy, 0, 10, rng_a) == sample_rollout(model, policy, 0, 10, rng_b));

    // empirical three-step frequencies against the exact composition
    const auto mu3 = n_step_distribution(model, policy, RolloutStart::from_state(0), 3);
    std::vector<double> counts(2, 0.0);
    Rng rng(8);
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) counts[sample_rollout(model, policy, 0, 3, rng)[2]] += 1.0;
    for (double& c : counts) c /= trials;
    CHECK(brute::tv(counts, mu3) <= 0.02);
}
