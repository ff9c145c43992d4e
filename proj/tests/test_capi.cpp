#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "gammamodel/capi.h"
#include "gammamodel/oracle.hpp"

namespace {

std::string temp_dir(const char* name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::filesystem::create_directories(path);
    return path.string();
}

}  // namespace

TEST_CASE("C API computes the swap-chain occupancy through handles") {
    gm_mdp* mdp = nullptr;
    REQUIRE(gm_mdp_swap_chain(&mdp) == GM_OK);
    CHECK(gm_mdp_n_states(mdp) == 2);
    CHECK(gm_mdp_n_actions(mdp) == 1);

    int violations = -1;
    CHECK(gm_mdp_validate(mdp, &violations) == GM_OK);
    CHECK(violations == 0);

    gm_policy* policy = nullptr;
    REQUIRE(gm_policy_uniform(2, 1, &policy) == GM_OK);

    gm_model* model = nullptr;
    REQUIRE(gm_exact_occupancy(mdp, policy, 0.5, &model) == GM_OK);
    CHECK(gm_model_gamma(model) == 0.5);
    double row[2] = {0.0, 0.0};
    REQUIRE(gm_model_probabilities(model, 0, 0, row) == GM_OK);
    CHECK(row[0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK(row[1] == doctest::Approx(2.0 / 3).epsilon(1e-9));

    gm_model_destroy(model);
    gm_policy_destroy(policy);
    gm_mdp_destroy(mdp);
}

TEST_CASE("C API rejects bad inputs with messages") {
    CHECK(gm_mdp_swap_chain(nullptr) == GM_ERR_VALIDATION);
    CHECK(std::strlen(gm_last_error()) > 0);

    const double transition[2] = {0.5, 0.4};
    const double reward[1] = {0.0};
    gm_mdp* mdp = nullptr;
    CHECK(gm_mdp_create(1, 2, transition, reward, &mdp) == GM_ERR_VALIDATION);
    CHECK(std::string(gm_last_error()).find("row sum") != std::string::npos);

    gm_mdp* chain = nullptr;
    REQUIRE(gm_mdp_swap_chain(&chain) == GM_OK);
    gm_policy* policy = nullptr;
    REQUIRE(gm_policy_uniform(2, 1, &policy) == GM_OK);
    gm_model* model = nullptr;
    CHECK(gm_exact_occupancy(chain, policy, 1.5, &model) == GM_ERR_VALIDATION);

    CHECK(gm_model_load("/nonexistent/gm.model", &model) == GM_ERR_IO);

    gm_policy_destroy(policy);
    gm_mdp_destroy(chain);
}

TEST_CASE("C API value queries agree with the C++ core") {
    gm_mdp* mdp = nullptr;
    REQUIRE(gm_mdp_gridworld(4, &mdp) == GM_OK);
    gm_policy* policy = nullptr;
    REQUIRE(gm_policy_uniform(16, 4, &policy) == GM_OK);

    std::vector<double> v(16, 0.0);
    std::vector<double> q(16 * 4, 0.0);
    REQUIRE(gm_policy_evaluation(mdp, policy, 0.99, v.data(), q.data()) == GM_OK);

    gm_model* occupancy = nullptr;
    REQUIRE(gm_exact_occupancy(mdp, policy, 0.8, &occupancy) == GM_OK);
    std::vector<double> reward(16, 0.0);
    REQUIRE(gm_mdp_reward(mdp, reward.data()) == GM_OK);

    double value = 0.0;
    double model_term = 0.0;
    double terminal_term = 0.0;
    for (int s = 0; s < 16; ++s) {
        REQUIRE(gm_gamma_mve(occupancy, policy, reward.data(), v.data(), s, 1, 0.99, &value,
                             &model_term, &terminal_term) == GM_OK);
        CHECK(std::abs(value - v[s]) <= 1e-8);
        CHECK(std::abs(value - model_term - terminal_term) <= 1e-12);
    }

    double weight = 0.0;
    REQUIRE(gm_terminal_weight(0.8, 0.99, 1, &weight) == GM_OK);
    CHECK(weight == doctest::Approx(0.95).epsilon(1e-12));

    int steps = 0;
    REQUIRE(gm_steps_to_mass(0.0, 0.99, 0.95, &steps) == GM_OK);
    CHECK(steps == 299);

    double pmf = 0.0;
    REQUIRE(gm_negative_binomial_pmf(2, 0.5, 3, &pmf) == GM_OK);
    CHECK(pmf == doctest::Approx(0.25).epsilon(1e-12));

    gm_model_destroy(occupancy);
    gm_policy_destroy(policy);
    gm_mdp_destroy(mdp);
}

TEST_CASE("C API trains, saves and reloads a model") {
    gm_mdp* mdp = nullptr;
    REQUIRE(gm_mdp_swap_chain(&mdp) == GM_OK);
    gm_policy* policy = nullptr;
    REQUIRE(gm_policy_uniform(2, 1, &policy) == GM_OK);

    gm_dataset* dataset = nullptr;
    REQUIRE(gm_dataset_collect(mdp, policy, 2000, 100, 7, &dataset) == GM_OK);
    CHECK(gm_dataset_size(dataset) == 2000);

    gm_train_options options;
    gm_train_options_init(&options);
    options.steps = 20000;
    gm_model* model = nullptr;
    REQUIRE(gm_train_sampled(dataset, policy, 0.5, &options, &model) == GM_OK);

    double row[2] = {0.0, 0.0};
    REQUIRE(gm_model_probabilities(model, 0, 0, row) == GM_OK);
    CHECK(std::abs(row[1] - 2.0 / 3.0) <= 0.03);

    const std::string dir = temp_dir("gm_capi_model");
    const std::string path = dir + "/model.model";
    REQUIRE(gm_model_save(model, path.c_str()) == GM_OK);
    gm_model* reloaded = nullptr;
    REQUIRE(gm_model_load(path.c_str(), &reloaded) == GM_OK);
    double reloaded_row[2] = {0.0, 0.0};
    REQUIRE(gm_model_probabilities(reloaded, 0, 0, reloaded_row) == GM_OK);
    CHECK(reloaded_row[0] == doctest::Approx(row[0]).epsilon(1e-12));

    gm_model_destroy(reloaded);
    gm_model_destroy(model);
    gm_dataset_destroy(dataset);
    gm_policy_destroy(policy);
    gm_mdp_destroy(mdp);
    std::filesystem::remove_all(dir);
}

TEST_CASE("C API expected training reaches the oracle") {
    gm_mdp* mdp = nullptr;
    REQUIRE(gm_mdp_swap_chain(&mdp) == GM_OK);
    gm_policy* policy = nullptr;
    REQUIRE(gm_policy_uniform(2, 1, &policy) == GM_OK);
    gm_model* model = nullptr;
    REQUIRE(gm_train_expected(mdp, policy, 0.5, 100, &model) == GM_OK);
    double row[2];
    REQUIRE(gm_model_probabilities(model, 0, 0, row) == GM_OK);
    CHECK(row[0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
    gm_model_destroy(model);
    gm_policy_destroy(policy);
    gm_mdp_destroy(mdp);
}

TEST_CASE("gm_run_command executes and reports unknown commands") {
    const std::string dir = temp_dir("gm_capi_cmd");
    const char* overrides[] = {"gammas=0,0.8", "gamma_tildes=0.99"};
    REQUIRE(gm_run_command("sweep-horizon", nullptr, overrides, 2, dir.c_str()) == GM_OK);
    CHECK(std::filesystem::exists(dir + "/sweep.csv"));
    CHECK(std::filesystem::exists(dir + "/manifest.json"));

    CHECK(gm_run_command("frobnicate", nullptr, nullptr, 0, dir.c_str()) == GM_ERR_VALIDATION);
    CHECK(std::string(gm_last_error()).find("unknown command") != std::string::npos);
    std::filesystem::remove_all(dir);
}
