#include "gammamodel/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gammamodel/value_expansion.hpp"

namespace gm {

namespace {

void softmax_into(std::span<const double> logits, std::span<double> out) {
    double mx = logits[0];
    for (double l : logits) mx = std::max(mx, l);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] /= sum;
}

}  // namespace

void SoftPolicy::probabilities(int s, std::span<double> out) const {
    softmax_into(logits_row(s), out);
}

PolicyTable SoftPolicy::to_policy_table() const {
    PolicyTable table(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) probabilities(s, table.row(s));
    return table;
}

std::vector<int> SoftPolicy::greedy_actions() const {
    std::vector<int> actions(n_states, 0);
    for (int s = 0; s < n_states; ++s) {
        const auto row = logits_row(s);
        int best = 0;
        for (int a = 1; a < n_actions; ++a)
            if (row[a] > row[best]) best = a;
        actions[s] = best;
    }
    return actions;
}

PolicyTable SoftPolicy::greedy_table() const {
    return PolicyTable::deterministic(greedy_actions(), n_actions);
}

Estimator estimator_from_name(const std::string& name) {
    if (name == "gamma_mve" || name == "gamma-mve") return Estimator::gamma_mve;
    if (name == "mve") return Estimator::mve;
    if (name == "model_free" || name == "model-free") return Estimator::model_free;
    throw std::invalid_argument("unknown estimator: " + name);
}

std::string estimator_name(Estimator estimator) {
    switch (estimator) {
        case Estimator::gamma_mve: return "gamma_mve";
        case Estimator::mve: return "mve";
        case Estimator::model_free: return "model_free";
    }
    throw std::logic_error("unreachable");
}

void validate_ac_config(const AcConfig& config) {
    if (!(config.gamma >= 0.0 && config.gamma < 1.0))
        throw std::invalid_argument("ac config: gamma must lie in [0, 1)");
    if (!(config.gamma_tilde >= 0.0 && config.gamma_tilde < 1.0))
        throw std::invalid_argument("ac config: gamma_tilde must lie in [0, 1)");
    if (config.estimator != Estimator::model_free) {
        if (config.gamma > config.gamma_tilde)
            throw std::invalid_argument("ac config: gamma must not exceed gamma_tilde");
        if (config.horizon < 1)
            throw std::invalid_argument("ac config: model-based estimators need horizon >= 1");
    }
    if (!(config.q_step > 0.0 && config.v_step > 0.0 && config.model_step > 0.0))
        throw std::invalid_argument("ac config: step sizes must be > 0");
    if (!(config.temperature > 0.0))
        throw std::invalid_argument("ac config: temperature must be > 0");
    if (!(config.model_tau > 0.0 && config.model_tau <= 1.0))
        throw std::invalid_argument("ac config: model tau must lie in (0, 1]");
    if (config.model_batch < 1 || config.model_update_every < 1)
        throw std::invalid_argument("ac config: model cadence values must be >= 1");
    if (config.episodes < 1 || config.steps_per_episode < 1)
        throw std::invalid_argument("ac config: episode counts must be >= 1");
    if (config.eval_every < 1 || config.eval_episodes < 1)
        throw std::invalid_argument("ac config: evaluation cadence must be >= 1");
    if (config.replay_capacity < 1)
        throw std::invalid_argument("ac config: replay capacity must be >= 1");
}

void q_update(Matrix& q, const TransitionSample& sample, double target_value, double gamma_tilde,
              double step_size) {
    double& cell = q(sample.s, sample.a);
    cell += step_size * (sample.r + gamma_tilde * target_value - cell);
}

void v_update(std::vector<double>& v, int s, const Matrix& q, const PolicyTable& policy,
              double temperature, double step_size) {
    double soft_target = 0.0;
    const auto probs = policy.row(s);
    for (int a = 0; a < policy.n_actions; ++a) {
        const double p = probs[a];
        if (p == 0.0) continue;  // 0 log 0 = 0
        soft_target += p * (q(s, a) - temperature * std::log(p));
    }
    v[s] += step_size * (soft_target - v[s]);
}

void policy_update(SoftPolicy& policy, int s, const Matrix& q) {
    auto logits = policy.logits_row(s);
    for (int a = 0; a < policy.n_actions; ++a) logits[a] = q(s, a) / policy.temperature;
}

void policy_gradient_update(SoftPolicy& policy, int s, const Matrix& q, double step_size) {
    const int n = policy.n_actions;
    std::vector<double> probs(n);
    policy.probabilities(s, probs);
    // d/d psi_a of E_{a ~ pi}[T log pi(a) - Q(a)] = pi_a (g_a - mean g),
    // g_a = T log pi(a) - Q(a)
    std::vector<double> g(n);
    double mean = 0.0;
    for (int a = 0; a < n; ++a) {
        g[a] = policy.temperature * std::log(std::max(probs[a], 1e-300)) - q(s, a);
        mean += probs[a] * g[a];
    }
    auto logits = policy.logits_row(s);
    for (int a = 0; a < n; ++a) logits[a] -= step_size * probs[a] * (g[a] - mean);
}

EvalResult evaluate_policy(Simulator& sim, const PolicyTable& policy, int episodes, int horizon,
                           Rng& rng) {
    if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
    if (horizon < 1) throw std::invalid_argument("evaluate_policy: horizon must be >= 1");
    if (policy.n_states != sim.n_states() || policy.n_actions != sim.n_actions())
        throw std::invalid_argument("evaluate_policy: policy dimensions mismatch");
    std::vector<double> returns(episodes, 0.0);
    for (int e = 0; e < episodes; ++e) {
        int state = sim.reset(rng);
        double total = 0.0;
        for (int t = 0; t < horizon; ++t) {
            const int action = rng.categorical(policy.row(state));
            const auto [next, reward] = sim.step(action, rng);
            total += reward;
            state = next;
        }
        returns[e] = total;
    }
    EvalResult result;
    for (double r : returns) result.mean += r;
    result.mean /= episodes;
    double var = 0.0;
    for (double r : returns) var += (r - result.mean) * (r - result.mean);
    result.stddev = std::sqrt(var / episodes);
    return result;
}

ActorCriticResult run_actor_critic(Simulator& sim, const AcConfig& config) {
    validate_ac_config(config);
    const int n_states = sim.n_states();
    const int n_actions = sim.n_actions();
    Rng rng(config.seed);
    // fixed evaluation stream: every evaluation sees the same start states
    const std::uint64_t eval_seed = config.seed ^ 0x9e3779b97f4a7c15ull;

    Matrix q(n_states, n_actions, 0.0);
    std::vector<double> v(n_states, 0.0);
    SoftPolicy policy(n_states, n_actions, config.temperature);
    std::vector<double> reward_estimate(n_states, 0.0);
    TransitionDataset buffer(config.replay_capacity);

    const bool uses_model = config.estimator != Estimator::model_free;
    const double model_gamma = config.estimator == Estimator::gamma_mve ? config.gamma : 0.0;
    TrainConfig model_config;
    model_config.step_size = config.model_step;
    model_config.tau = config.model_tau;
    model_config.batch_size = config.model_batch;
    model_config.samples_per_pair = 1;
    TdTrainer trainer(n_states, n_actions, model_gamma, model_config);

    ActorCriticResult result;
    std::vector<double> action_probs(n_actions);
    long env_steps = 0;

    for (int episode = 0; episode < config.episodes; ++episode) {
        int state = sim.reset(rng);
        for (int t = 0; t < config.steps_per_episode; ++t) {
            policy.probabilities(state, action_probs);
            const int action = rng.categorical(action_probs);
            const auto [next, reward] = sim.step(action, rng);
            buffer.push({state, action, reward, next});
            reward_estimate[next] = reward;  // rewards attach to entered states
            ++env_steps;

            const PolicyTable table = policy.to_policy_table();
            if (uses_model && env_steps % config.model_update_every == 0)
                trainer.step(buffer, table, rng);

            // one replayed gradient step per environment step
            const TransitionSample& sample =
                buffer[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(buffer.size())))];
            double v_estimate = 0.0;
            switch (config.estimator) {
                case Estimator::model_free:
                    v_estimate = v[sample.s_next];
                    break;
                case Estimator::gamma_mve:
                    v_estimate = gamma_mve_estimate(trainer.model(), table, reward_estimate, v,
                                                    sample.s_next, config.horizon,
                                                    config.gamma_tilde)
                                     .value;
                    break;
                case Estimator::mve:
                    v_estimate = mve_estimate(trainer.model(), table, reward_estimate, v,
                                              sample.s_next, config.horizon, config.gamma_tilde);
                    break;
            }
            q_update(q, sample, v_estimate, config.gamma_tilde, config.q_step);
            v_update(v, sample.s, q, table, config.temperature, config.v_step);
            policy_update(policy, sample.s, q);
            state = next;
        }
        if ((episode + 1) % config.eval_every == 0) {
            Rng eval_rng(eval_seed);
            const EvalResult eval = evaluate_policy(sim, policy.greedy_table(),
                                                    config.eval_episodes,
                                                    config.steps_per_episode, eval_rng);
            result.curve.push_back({episode + 1, eval.mean, eval.stddev});
        }
    }

    result.q = std::move(q);
    result.v = std::move(v);
    result.policy = std::move(policy);
    result.model = trainer.model();
    return result;
}

}  // namespace gm
