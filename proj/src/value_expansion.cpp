#include "gammamodel/value_expansion.hpp"

#include <cmath>
#include <stdexcept>

namespace gm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

void check_state_sized(std::span<const double> values, int n_states, const char* what) {
    if (values.size() != static_cast<std::size_t>(n_states))
        throw std::invalid_argument(std::string(what) + ": size mismatch");
}

// V = sum_{n=1}^{H} gt^{n-1} E[r(s_{t+n})] + gt^H E[V(s_{t+H})] along an
// arbitrary one-step kernel
double expand_along_kernel(const Matrix& kernel, std::span<const double> reward,
                           std::span<const double> v, int s, int horizon, double gamma_tilde) {
    if (horizon == 0) return v[s];
    const int n = kernel.rows;
    std::vector<double> dist(n, 0.0);
    std::vector<double> next(n, 0.0);
    dist[s] = 1.0;
    double value = 0.0;
    double weight = 1.0;  // gt^{n-1}
    for (int step = 1; step <= horizon; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double w = dist[i];
            if (w == 0.0) continue;
            const auto row = kernel.row(i);
            for (int j = 0; j < n; ++j) next[j] += w * row[j];
        }
        dist.swap(next);
        value += weight * dot(dist, reward);
        weight *= gamma_tilde;
    }
    return value + weight * dot(dist, v);  // weight is now gt^H
}

}  // namespace

double q_from_model(const GammaModelTable& model, std::span<const double> reward, int s, int a) {
    check_state_sized(reward, model.n_states(), "q_from_model reward");
    if (s < 0 || s >= model.n_states() || a < 0 || a >= model.n_actions())
        throw std::invalid_argument("q_from_model: index out of bounds");
    const std::vector<double> probs = model.probabilities(s, a);
    return dot(probs, reward) / (1.0 - model.gamma());
}

double mve_estimate(const TabularMdp& mdp, const PolicyTable& policy, std::span<const double> v,
                    int s, int horizon, double gamma_tilde) {
    if (horizon < 0) throw std::invalid_argument("mve_estimate: horizon must be >= 0");
    check_state_sized(v, mdp.n_states, "mve_estimate value table");
    if (!(gamma_tilde >= 0.0 && gamma_tilde < 1.0))
        throw std::invalid_argument("mve_estimate: gamma_tilde must lie in [0, 1)");
    const Matrix kernel = policy_transition_matrix(mdp, policy);
    return expand_along_kernel(kernel, mdp.reward, v, s, horizon, gamma_tilde);
}

double mve_estimate(const GammaModelTable& single_step_model, const PolicyTable& policy,
                    std::span<const double> reward, std::span<const double> v, int s, int horizon,
                    double gamma_tilde) {
    if (horizon < 0) throw std::invalid_argument("mve_estimate: horizon must be >= 0");
    if (single_step_model.gamma() != 0.0)
        throw std::invalid_argument("mve_estimate: expected a single-step (gamma = 0) model");
    check_state_sized(reward, single_step_model.n_states(), "mve_estimate reward");
    check_state_sized(v, single_step_model.n_states(), "mve_estimate value table");
    const Matrix kernel = state_conditioned(single_step_model, policy);
    return expand_along_kernel(kernel, reward, v, s, horizon, gamma_tilde);
}

ValueEstimate gamma_mve_estimate(const GammaModelTable& model, const PolicyTable& policy,
                                 std::span<const double> reward, std::span<const double> v, int s,
                                 int horizon, double gamma_tilde) {
    if (horizon < 1) throw std::invalid_argument("gamma_mve_estimate: horizon must be >= 1");
    if (gamma_tilde < model.gamma())
        throw std::invalid_argument("gamma_mve_estimate: gamma_tilde must be >= model gamma");
    check_state_sized(reward, model.n_states(), "gamma_mve_estimate reward");
    check_state_sized(v, model.n_states(), "gamma_mve_estimate value table");

    const RolloutWeights weights = rollout_weights(model.gamma(), gamma_tilde, horizon);
    const auto steps = n_step_sequence(model, policy, RolloutStart::from_state(s), horizon);

    ValueEstimate estimate;
    estimate.horizon = horizon;
    estimate.gamma = model.gamma();
    estimate.gamma_tilde = gamma_tilde;
    double model_term = 0.0;
    for (int n = 0; n < horizon; ++n) model_term += weights.alphas[n] * dot(steps[n], reward);
    estimate.model_term = model_term / (1.0 - gamma_tilde);
    estimate.terminal_term = weights.tail_mass * dot(steps[horizon - 1], v);
    estimate.value = estimate.model_term + estimate.terminal_term;
    return estimate;
}

ValueEstimate gamma_mve_estimate_sampled(const GammaModelTable& model, const PolicyTable& policy,
                                         std::span<const double> reward, std::span<const double> v,
                                         int s, int horizon, double gamma_tilde, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("gamma_mve_estimate: horizon must be >= 1");
    if (gamma_tilde < model.gamma())
        throw std::invalid_argument("gamma_mve_estimate: gamma_tilde must be >= model gamma");
    check_state_sized(reward, model.n_states(), "gamma_mve_estimate reward");
    check_state_sized(v, model.n_states(), "gamma_mve_estimate value table");

    const RolloutWeights weights = rollout_weights(model.gamma(), gamma_tilde, horizon);
    const std::vector<int> rollout = sample_rollout(model, policy, s, horizon, rng);

    ValueEstimate estimate;
    estimate.horizon = horizon;
    estimate.gamma = model.gamma();
    estimate.gamma_tilde = gamma_tilde;
    double model_term = 0.0;
    for (int n = 0; n < horizon; ++n) model_term += weights.alphas[n] * reward[rollout[n]];
    estimate.model_term = model_term / (1.0 - gamma_tilde);
    estimate.terminal_term = weights.tail_mass * v[rollout[horizon - 1]];
    estimate.value = estimate.model_term + estimate.terminal_term;
    return estimate;
}

double terminal_weight(double gamma, double gamma_tilde, int horizon) {
    if (horizon < 1) throw std::invalid_argument("terminal_weight: horizon must be >= 1");
    const RolloutWeights weights = rollout_weights(gamma, gamma_tilde, horizon);
    return weights.tail_mass;
}

EffectiveHorizon effective_horizon_match(double gamma, double gamma_tilde, int horizon) {
    if (horizon < 1) throw std::invalid_argument("effective_horizon_match: horizon must be >= 1");
    if (!(gamma_tilde > 0.0 && gamma_tilde < 1.0))
        throw std::invalid_argument("effective_horizon_match: gamma_tilde must lie in (0, 1)");
    if (!(gamma >= 0.0 && gamma <= gamma_tilde))
        throw std::invalid_argument("effective_horizon_match: gamma must lie in [0, gamma_tilde]");
    EffectiveHorizon match;
    if (gamma == gamma_tilde) {
        // terminal weight is 0 at every H; no finite single-step length matches
        match.infinite = true;
        return match;
    }
    const double ratio = (gamma_tilde - gamma) / (1.0 - gamma);
    match.real_horizon = horizon * std::log(ratio) / std::log(gamma_tilde);
    match.rounded = static_cast<int>(std::llround(match.real_horizon));
    return match;
}

}  // namespace gm
