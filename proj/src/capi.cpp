#include "gammamodel/capi.h"

#include <cstring>
#include <string>

#include "gammamodel/commands.hpp"
#include "gammamodel/control.hpp"
#include "gammamodel/dataset.hpp"
#include "gammamodel/envs.hpp"
#include "gammamodel/gamma_td.hpp"
#include "gammamodel/io.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/oracle.hpp"
#include "gammamodel/rollout.hpp"
#include "gammamodel/value_expansion.hpp"

struct gm_mdp {
    gm::TabularMdp mdp;
};

struct gm_policy {
    gm::PolicyTable policy;
};

struct gm_model {
    gm::GammaModelTable model;
};

struct gm_dataset {
    gm::TransitionDataset dataset;
};

namespace {

thread_local std::string g_last_error;

void set_error(const char* message) { g_last_error = message ? message : ""; }

gm_status fail(gm_status status, const char* message) {
    set_error(message);
    return status;
}

// Runs the body, mapping exceptions onto the status codes.
template <typename Fn>
gm_status guarded(Fn&& body) {
    try {
        body();
        g_last_error.clear();
        return GM_OK;
    } catch (const gm::IoError& e) {
        return fail(GM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(GM_ERR_VALIDATION, e.what());
    } catch (...) {
        return fail(GM_ERR_VALIDATION, "unknown error");
    }
}

gm_status require(bool condition, const char* message) {
    return condition ? GM_OK : fail(GM_ERR_VALIDATION, message);
}

}  // namespace

extern "C" {

const char* gm_last_error(void) { return g_last_error.c_str(); }

/* -------------------------------------------------------------------- MDPs */

gm_status gm_mdp_create(int n_states, int n_actions, const double* transition,
                        const double* reward, gm_mdp** out) {
    if (require(transition && reward && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::TabularMdp mdp(n_states, n_actions);
        std::memcpy(mdp.transition.data(), transition, mdp.transition.size() * sizeof(double));
        std::memcpy(mdp.reward.data(), reward, mdp.reward.size() * sizeof(double));
        const auto violations = gm::validate_mdp(mdp);
        if (!violations.empty()) throw std::invalid_argument(violations.front());
        *out = new gm_mdp{std::move(mdp)};
    });
}

gm_status gm_mdp_gridworld(int size, gm_mdp** out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = new gm_mdp{gm::gridworld_mdp(size).mdp}; });
}

gm_status gm_mdp_swap_chain(gm_mdp** out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = new gm_mdp{gm::swap_chain_mdp()}; });
}

gm_status gm_mdp_random(int n_states, int n_actions, uint64_t seed, gm_mdp** out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::Rng rng(seed);
        *out = new gm_mdp{gm::random_mdp(n_states, n_actions, rng)};
    });
}

gm_status gm_mdp_discretized(const char* env, const int* bins, int n_dims, int n_actions,
                             gm_mdp** out) {
    if (require(env && bins && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const gm::EnvId id = gm::env_from_name(env);
        const auto spec = gm::default_discretization(id, {bins, static_cast<std::size_t>(n_dims)},
                                                     n_actions);
        *out = new gm_mdp{gm::discretized_mdp(id, spec)};
    });
}

void gm_mdp_destroy(gm_mdp* mdp) { delete mdp; }

int gm_mdp_n_states(const gm_mdp* mdp) { return mdp ? mdp->mdp.n_states : 0; }

int gm_mdp_n_actions(const gm_mdp* mdp) { return mdp ? mdp->mdp.n_actions : 0; }

gm_status gm_mdp_reward(const gm_mdp* mdp, double* out) {
    if (require(mdp && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    std::memcpy(out, mdp->mdp.reward.data(), mdp->mdp.reward.size() * sizeof(double));
    g_last_error.clear();
    return GM_OK;
}

gm_status gm_mdp_validate(const gm_mdp* mdp, int* n_violations) {
    if (require(mdp && n_violations, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *n_violations = static_cast<int>(gm::validate_mdp(mdp->mdp).size()); });
}

/* ---------------------------------------------------------------- policies */

gm_status gm_policy_uniform(int n_states, int n_actions, gm_policy** out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = new gm_policy{gm::PolicyTable::uniform(n_states, n_actions)}; });
}

gm_status gm_policy_create(int n_states, int n_actions, const double* probs, gm_policy** out) {
    if (require(probs && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::PolicyTable policy(n_states, n_actions);
        std::memcpy(policy.probs.data(), probs, policy.probs.size() * sizeof(double));
        const auto violations = gm::validate_policy(policy);
        if (!violations.empty()) throw std::invalid_argument(violations.front());
        *out = new gm_policy{std::move(policy)};
    });
}

void gm_policy_destroy(gm_policy* policy) { delete policy; }

/* ----------------------------------------------------------------- oracles */

gm_status gm_exact_occupancy(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                             gm_model** out) {
    if (require(mdp && policy && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto occupancy = gm::exact_occupancy(mdp->mdp, policy->policy, gamma);
        *out = new gm_model{gm::GammaModelTable::from_occupancy(occupancy)};
    });
}

gm_status gm_exact_successor(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                             double* out) {
    if (require(mdp && policy && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto successor = gm::exact_successor(mdp->mdp, policy->policy, gamma);
        std::memcpy(out, successor.m.data(), successor.m.size() * sizeof(double));
    });
}

gm_status gm_policy_evaluation(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                               double* v_out, double* q_out) {
    if (require(mdp && policy && v_out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto values = gm::policy_evaluation(mdp->mdp, policy->policy, gamma);
        std::memcpy(v_out, values.v.data(), values.v.size() * sizeof(double));
        if (q_out)
            std::memcpy(q_out, values.q.data.data(), values.q.data.size() * sizeof(double));
    });
}

gm_status gm_value_iteration(const gm_mdp* mdp, double gamma, double tolerance, double* v_out,
                             int* greedy_out) {
    if (require(mdp && v_out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto result = gm::value_iteration(mdp->mdp, gamma, tolerance);
        std::memcpy(v_out, result.v.data(), result.v.size() * sizeof(double));
        if (greedy_out)
            std::memcpy(greedy_out, result.greedy_actions.data(),
                        result.greedy_actions.size() * sizeof(int));
    });
}

gm_status gm_monte_carlo_occupancy(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                   int s, int a, long n_samples, uint64_t seed, double* out) {
    if (require(mdp && policy && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::Rng rng(seed);
        const auto counts =
            gm::monte_carlo_occupancy(mdp->mdp, policy->policy, gamma, s, a, n_samples, rng);
        std::memcpy(out, counts.data(), counts.size() * sizeof(double));
    });
}

/* ------------------------------------------------------------------ models */

gm_status gm_model_uniform(int n_states, int n_actions, double gamma, gm_model** out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = new gm_model{gm::GammaModelTable(n_states, n_actions, gamma)}; });
}

void gm_model_destroy(gm_model* model) { delete model; }

int gm_model_n_states(const gm_model* model) { return model ? model->model.n_states() : 0; }

int gm_model_n_actions(const gm_model* model) { return model ? model->model.n_actions() : 0; }

double gm_model_gamma(const gm_model* model) { return model ? model->model.gamma() : 0.0; }

gm_status gm_model_probabilities(const gm_model* model, int s, int a, double* out) {
    if (require(model && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        if (s < 0 || s >= model->model.n_states() || a < 0 || a >= model->model.n_actions())
            throw std::invalid_argument("row index out of bounds");
        model->model.probabilities(s, a, {out, static_cast<std::size_t>(model->model.n_states())});
    });
}

gm_status gm_model_save(const gm_model* model, const char* path) {
    if (require(model && path, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { gm::save_model_file(gm::to_model_file(model->model), path); });
}

gm_status gm_model_load(const char* path, gm_model** out) {
    if (require(path && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        *out = new gm_model{gm::to_gamma_model(gm::load_model_file(path))};
    });
}

/* ---------------------------------------------------------------- datasets */

gm_status gm_dataset_collect(const gm_mdp* mdp, const gm_policy* policy, long n_steps,
                             long episode_length, uint64_t seed, gm_dataset** out) {
    if (require(mdp && policy && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::Rng rng(seed);
        *out = new gm_dataset{
            gm::collect_dataset(mdp->mdp, policy->policy, n_steps, rng, episode_length)};
    });
}

gm_status gm_dataset_enumerate(const gm_mdp* mdp, int copies_per_pair, uint64_t seed,
                               gm_dataset** out) {
    if (require(mdp && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::Rng rng(seed);
        *out = new gm_dataset{gm::enumerate_dataset(mdp->mdp, copies_per_pair, rng)};
    });
}

gm_status gm_dataset_save(const gm_dataset* dataset, const char* path) {
    if (require(dataset && path, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        try {
            gm::write_dataset_csv(dataset->dataset, path);
        } catch (const std::runtime_error& e) {
            throw gm::IoError(e.what());
        }
    });
}

gm_status gm_dataset_load(const char* path, gm_dataset** out) {
    if (require(path && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        try {
            *out = new gm_dataset{gm::read_dataset_csv(path)};
        } catch (const std::runtime_error& e) {
            throw gm::IoError(e.what());
        }
    });
}

long gm_dataset_size(const gm_dataset* dataset) {
    return dataset ? static_cast<long>(dataset->dataset.size()) : 0;
}

void gm_dataset_destroy(gm_dataset* dataset) { delete dataset; }

/* ---------------------------------------------------------------- training */

void gm_train_options_init(gm_train_options* options) {
    if (!options) return;
    options->step_size = 1e-2;
    options->tau = 5e-3;
    options->batch_size = 128;
    options->steps = 50000;
    options->samples_per_pair = 1;
    options->seed = 0;
}

gm_status gm_train_sampled(const gm_dataset* dataset, const gm_policy* policy, double gamma,
                           const gm_train_options* options, gm_model** out) {
    if (require(dataset && policy && options && out, "null argument") != GM_OK)
        return GM_ERR_VALIDATION;
    return guarded([&] {
        gm::TrainConfig config;
        config.step_size = options->step_size;
        config.tau = options->tau;
        config.batch_size = options->batch_size;
        config.steps = options->steps;
        config.samples_per_pair = options->samples_per_pair;
        config.seed = options->seed;
        gm::Rng rng(options->seed);
        *out = new gm_model{
            gm::sampled_td_train(dataset->dataset, policy->policy, gamma, config, rng)};
    });
}

gm_status gm_train_expected(const gm_mdp* mdp, const gm_policy* policy, double gamma, int sweeps,
                            gm_model** out) {
    if (require(mdp && policy && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        *out = new gm_model{gm::expected_td_fixed_point(mdp->mdp, policy->policy, gamma, sweeps)};
    });
}

/* --------------------------------------------------- rollouts and horizons */

gm_status gm_rollout_weights(double gamma, double gamma_tilde, int horizon, double* alphas_out,
                             double* tail_out) {
    if (require(alphas_out && tail_out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto weights = gm::rollout_weights(gamma, gamma_tilde, horizon);
        std::memcpy(alphas_out, weights.alphas.data(), weights.alphas.size() * sizeof(double));
        *tail_out = weights.tail_mass;
    });
}

gm_status gm_steps_to_mass(double gamma, double gamma_tilde, double coverage, int* out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = gm::steps_to_mass(gamma, gamma_tilde, coverage); });
}

gm_status gm_negative_binomial_pmf(int n, double gamma, long t, double* out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = gm::negative_binomial_pmf(n, gamma, t); });
}

gm_status gm_reweighted_distribution(const gm_model* model, const gm_policy* policy, int state,
                                     int action, double gamma_tilde, int horizon,
                                     double* dist_out, double* tail_out) {
    if (require(model && policy && dist_out && tail_out, "null argument") != GM_OK)
        return GM_ERR_VALIDATION;
    return guarded([&] {
        const gm::RolloutStart start = action < 0
                                           ? gm::RolloutStart::from_state(state)
                                           : gm::RolloutStart::from_state_action(state, action);
        const auto result = gm::reweighted_distribution(model->model, policy->policy, start,
                                                        gamma_tilde, horizon);
        std::memcpy(dist_out, result.distribution.data(),
                    result.distribution.size() * sizeof(double));
        *tail_out = result.tail_mass;
    });
}

/* ------------------------------------------------------------ value queries */

gm_status gm_q_from_model(const gm_model* model, const double* reward, int s, int a, double* out) {
    if (require(model && reward && out, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] {
        *out = gm::q_from_model(model->model,
                                {reward, static_cast<std::size_t>(model->model.n_states())}, s, a);
    });
}

gm_status gm_gamma_mve(const gm_model* model, const gm_policy* policy, const double* reward,
                       const double* v, int s, int horizon, double gamma_tilde, double* value_out,
                       double* model_term_out, double* terminal_term_out) {
    if (require(model && policy && reward && v && value_out, "null argument") != GM_OK)
        return GM_ERR_VALIDATION;
    return guarded([&] {
        const auto n = static_cast<std::size_t>(model->model.n_states());
        const auto estimate = gm::gamma_mve_estimate(model->model, policy->policy, {reward, n},
                                                     {v, n}, s, horizon, gamma_tilde);
        *value_out = estimate.value;
        if (model_term_out) *model_term_out = estimate.model_term;
        if (terminal_term_out) *terminal_term_out = estimate.terminal_term;
    });
}

gm_status gm_terminal_weight(double gamma, double gamma_tilde, int horizon, double* out) {
    if (require(out != nullptr, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    return guarded([&] { *out = gm::terminal_weight(gamma, gamma_tilde, horizon); });
}

/* -------------------------------------------------------------- CLI commands */

gm_status gm_run_command(const char* command, const char* config_path,
                         const char* const* overrides, int n_overrides, const char* out_dir) {
    if (require(command && out_dir, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    gm::Config config;
    std::string error;
    try {
        if (config_path) config = gm::parse_config_file(config_path);
        std::vector<std::string> extra;
        for (int i = 0; i < n_overrides; ++i)
            if (overrides && overrides[i]) extra.emplace_back(overrides[i]);
        gm::apply_overrides(config, extra);
    } catch (const gm::IoError& e) {
        return fail(GM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(GM_ERR_VALIDATION, e.what());
    }
    const gm::CommandStatus status = gm::run_command(command, config, out_dir, &error);
    if (status != gm::CommandStatus::ok) return fail(static_cast<gm_status>(status), error.c_str());
    g_last_error.clear();
    return GM_OK;
}

gm_status gm_rerun_manifest(const char* manifest_path, const char* out_dir) {
    if (require(manifest_path && out_dir, "null argument") != GM_OK) return GM_ERR_VALIDATION;
    std::string error;
    const gm::CommandStatus status = gm::run_from_manifest(manifest_path, out_dir, &error);
    if (status != gm::CommandStatus::ok) return fail(static_cast<gm_status>(status), error.c_str());
    g_last_error.clear();
    return GM_OK;
}

} /* extern "C" */
