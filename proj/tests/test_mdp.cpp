#include <doctest.h>

#include "brute.hpp"
#include "gammamodel/mdp.hpp"

using namespace gm;

TEST_CASE("validate_mdp accepts the swap chain") {
    CHECK(validate_mdp(swap_chain_mdp()).empty());
}

TEST_CASE("validate_mdp reports row sums with the offending index") {
    TabularMdp mdp(2, 1);
    mdp.transition_row(0, 0)[0] = 0.5;
    mdp.transition_row(0, 0)[1] = 0.4;
    mdp.transition_row(1, 0)[0] = 1.0;
    const auto violations = validate_mdp(mdp);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("row sum 0.9") != std::string::npos);
    CHECK(violations[0].find("(s=0,a=0)") != std::string::npos);
}

TEST_CASE("validate_mdp reports negative entries") {
    TabularMdp mdp(2, 1);
    mdp.transition_row(0, 0)[0] = -0.1;
    mdp.transition_row(0, 0)[1] = 1.1;
    mdp.transition_row(1, 0)[1] = 1.0;
    const auto violations = validate_mdp(mdp);
    REQUIRE(!violations.empty());
    CHECK(violations[0].find("negative entry") != std::string::npos);
}

TEST_CASE("validate_mdp flags non-finite rewards") {
    TabularMdp mdp = swap_chain_mdp();
    mdp.reward[1] = std::numeric_limits<double>::infinity();
    const auto violations = validate_mdp(mdp);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("non-finite reward at s=1") != std::string::npos);
}

TEST_CASE("policy_transition_matrix on deterministic inputs is a permutation") {
    const TabularMdp mdp = swap_chain_mdp();
    const std::vector<int> actions = {0, 0};
    const PolicyTable policy = PolicyTable::deterministic(actions, 1);
    const Matrix kernel = policy_transition_matrix(mdp, policy);
    CHECK(kernel(0, 1) == 1.0);
    CHECK(kernel(1, 0) == 1.0);
    CHECK(kernel(0, 0) == 0.0);
}

TEST_CASE("policy_transition_matrix mixes one-hot rows") {
    // two actions pointing at e0 and e1; uniform policy gives [0.5, 0.5]
    TabularMdp mdp(2, 2);
    mdp.transition_row(0, 0)[0] = 1.0;
    mdp.transition_row(0, 1)[1] = 1.0;
    mdp.transition_row(1, 0)[0] = 1.0;
    mdp.transition_row(1, 1)[1] = 1.0;
    const Matrix kernel = policy_transition_matrix(mdp, PolicyTable::uniform(2, 2));
    CHECK(kernel(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kernel(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("policy_transition_matrix rows sum to one on random instances") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng(seed);
        const TabularMdp mdp = random_mdp(5, 3, rng);
        const PolicyTable policy = random_policy(5, 3, rng);
        const Matrix kernel = policy_transition_matrix(mdp, policy);
        for (int s = 0; s < 5; ++s) {
            double sum = 0.0;
            for (int j = 0; j < 5; ++j) sum += kernel(s, j);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("policy_transition_matrix rejects mismatched shapes") {
    CHECK_THROWS_AS(policy_transition_matrix(swap_chain_mdp(), PolicyTable::uniform(3, 1)),
                    std::invalid_argument);
}

TEST_CASE("builders produce valid MDPs and policies") {
    Rng rng(7);
    CHECK(validate_mdp(random_mdp(12, 4, rng)).empty());
    CHECK(validate_mdp(absorbing_chain_mdp(3)).empty());
    CHECK(validate_policy(random_policy(12, 4, rng)).empty());
    CHECK(validate_policy(PolicyTable::uniform(4, 2)).empty());
}
