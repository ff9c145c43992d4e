#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gammamodel/dataset.hpp"
#include "gammamodel/envs.hpp"
#include "gammamodel/gamma_td.hpp"
#include "gammamodel/matrix.hpp"
#include "gammamodel/mdp.hpp"

namespace gm {

/// Softmax policy over logits with an entropy temperature.
struct SoftPolicy {
    int n_states = 0;
    int n_actions = 0;
    double temperature = 1.0;
    std::vector<double> logits;  // [s][a]

    SoftPolicy() = default;
    SoftPolicy(int states, int actions, double temp)
        : n_states(states),
          n_actions(actions),
          temperature(temp),
          logits(static_cast<std::size_t>(states) * actions, 0.0) {}

    std::span<double> logits_row(int s) {
        return {logits.data() + static_cast<std::size_t>(s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }
    std::span<const double> logits_row(int s) const {
        return {logits.data() + static_cast<std::size_t>(s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }

    void probabilities(int s, std::span<double> out) const;
    PolicyTable to_policy_table() const;
    /// Argmax actions, lowest index on exact ties.
    std::vector<int> greedy_actions() const;
    PolicyTable greedy_table() const;
};

enum class Estimator { gamma_mve, mve, model_free };

Estimator estimator_from_name(const std::string& name);
std::string estimator_name(Estimator estimator);

/// Actor-critic configuration. The flagship setting mirrors a model discount
/// of 0.8, a value discount of 0.99 and a single model step, with the MVE
/// baseline run at the terminal-weight-matched rollout length.
struct AcConfig {
    Estimator estimator = Estimator::gamma_mve;
    double gamma = 0.8;         // model discount
    double gamma_tilde = 0.99;  // value discount
    int horizon = 1;            // model steps (gamma_mve) or rollout length (mve)
    double q_step = 0.2;
    double v_step = 0.2;
    double temperature = 1.0;
    double model_step = 0.5;
    double model_tau = 5e-3;
    int model_batch = 32;
    int model_update_every = 1;  // env steps between model batch updates
    int episodes = 500;
    int steps_per_episode = 30;
    int eval_every = 10;    // episodes between evaluation points
    int eval_episodes = 10;
    std::size_t replay_capacity = 100000;
    std::uint64_t seed = 0;
};

void validate_ac_config(const AcConfig& config);

struct LearningCurvePoint {
    int episode = 0;
    double return_mean = 0.0;
    double return_std = 0.0;
};

struct ActorCriticResult {
    std::vector<LearningCurvePoint> curve;
    Matrix q;
    std::vector<double> v;
    SoftPolicy policy;
    GammaModelTable model;
};

/// Tabular entropy-regularized actor-critic with a replay buffer and a
/// gamma-model trained online in sampled mode. Per environment step: collect
/// a transition, update the model (per the cadence), then update Q toward
/// r + gt * V_est(s') on a replayed transition, V toward the soft value and
/// the policy to its closed-form optimum. V_est is chosen by the estimator:
/// the probabilistic-horizon expansion, standard MVE over a learned
/// single-step model, or the value table alone. Deterministic given the
/// config seed.
ActorCriticResult run_actor_critic(Simulator& sim, const AcConfig& config);

/// Q(s,a) += step * (r + gamma_tilde * target_value - Q(s,a)).
void q_update(Matrix& q, const TransitionSample& sample, double target_value, double gamma_tilde,
              double step_size);

/// V(s) moves toward sum_a pi(a|s) (Q(s,a) - temperature * log pi(a|s)) by
/// factor step_size (exact expectation over actions).
void v_update(std::vector<double>& v, int s, const Matrix& q, const PolicyTable& policy,
              double temperature, double step_size);

/// Closed-form policy improvement: pi(.|s) = softmax(Q(s,.) / temperature),
/// the exact minimizer of the entropy-regularized policy objective for
/// tabular policies.
void policy_update(SoftPolicy& policy, int s, const Matrix& q);

/// Gradient-step variant of the same objective,
/// psi_a -= step * pi(a) (T log pi(a) - Q(a) - mean).
void policy_gradient_update(SoftPolicy& policy, int s, const Matrix& q, double step_size);

struct EvalResult {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Mean and population std of the undiscounted return over fixed-horizon
/// episodes. Deterministic for a given rng.
EvalResult evaluate_policy(Simulator& sim, const PolicyTable& policy, int episodes, int horizon,
                           Rng& rng);

}  // namespace gm
