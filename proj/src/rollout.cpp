#include "gammamodel/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gm {

namespace {

void check_discounts(double gamma, double gamma_tilde) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("rollout: gamma must lie in [0, 1)");
    if (!(gamma_tilde < 1.0))
        throw std::invalid_argument("rollout: gamma_tilde must be < 1");
    if (gamma_tilde < gamma)
        throw std::invalid_argument("rollout: gamma_tilde must be >= gamma");
}

void check_start(const GammaModelTable& model, RolloutStart start) {
    if (start.state < 0 || start.state >= model.n_states())
        throw std::invalid_argument("rollout: start state out of bounds");
    if (start.has_action() && start.action >= model.n_actions())
        throw std::invalid_argument("rollout: start action out of bounds");
}

}  // namespace

RolloutWeights rollout_weights(double gamma, double gamma_tilde, int horizon) {
    check_discounts(gamma, gamma_tilde);
    if (horizon < 1) throw std::invalid_argument("rollout_weights: horizon must be >= 1");
    RolloutWeights weights;
    weights.gamma = gamma;
    weights.gamma_tilde = gamma_tilde;
    weights.horizon = horizon;
    weights.alphas.resize(horizon);
    const double ratio = (gamma_tilde - gamma) / (1.0 - gamma);
    double alpha = (1.0 - gamma_tilde) / (1.0 - gamma);
    for (int n = 0; n < horizon; ++n) {
        weights.alphas[n] = alpha;
        alpha *= ratio;
    }
    weights.tail_mass = std::pow(ratio, horizon);
    return weights;
}

double negative_binomial_pmf(int n, double gamma, long t) {
    if (n < 1) throw std::invalid_argument("negative_binomial_pmf: n must be >= 1");
    if (t < 0) throw std::invalid_argument("negative_binomial_pmf: t must be >= 0");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("negative_binomial_pmf: gamma must lie in [0, 1)");
    if (t < n) return 0.0;  // no support below n steps
    if (gamma == 0.0) return t == n ? 1.0 : 0.0;

    const long failures = t - n;
    const long r = std::min<long>(failures, t - 1 - failures);  // C(t-1, r)
    const double log_choose = std::lgamma(static_cast<double>(t)) -
                              std::lgamma(static_cast<double>(r) + 1.0) -
                              std::lgamma(static_cast<double>(t - r));
    // exact integer product while every intermediate fits a double,
    // log-space with exponentiation at the end otherwise (stable out to
    // t ~ 1e4); intermediates are bounded by C(t-1, r) * r
    if (log_choose + std::log(static_cast<double>(r) + 1.0) < 36.5) {  // < 2^53 with margin
        double choose = 1.0;
        for (long i = 1; i <= r; ++i)
            choose = choose * static_cast<double>(t - 1 - r + i) / static_cast<double>(i);
        return choose * std::pow(gamma, static_cast<double>(failures)) *
               std::pow(1.0 - gamma, static_cast<double>(n));
    }
    return std::exp(log_choose + static_cast<double>(failures) * std::log(gamma) +
                    static_cast<double>(n) * std::log1p(-gamma));
}

std::vector<double> timestep_mixture(double gamma, double gamma_tilde, int horizon, long t_max) {
    if (t_max < 1) throw std::invalid_argument("timestep_mixture: t_max must be >= 1");
    const RolloutWeights weights = rollout_weights(gamma, gamma_tilde, horizon);
    std::vector<double> q(t_max, 0.0);
    for (long t = 1; t <= t_max; ++t) {
        const int n_max = static_cast<int>(std::min<long>(t, horizon));
        double mass = 0.0;
        for (int n = 1; n <= n_max; ++n)
            mass += weights.alphas[n - 1] * negative_binomial_pmf(n, gamma, t);
        q[t - 1] = mass;
    }
    return q;
}

std::vector<std::vector<double>> n_step_sequence(const GammaModelTable& model,
                                                 const PolicyTable& policy, RolloutStart start,
                                                 int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("n_step_sequence: n_steps must be >= 1");
    check_start(model, start);
    const int n = model.n_states();
    const Matrix mixed = state_conditioned(model, policy);

    std::vector<std::vector<double>> steps;
    steps.reserve(n_steps);
    if (start.has_action()) {
        steps.push_back(model.probabilities(start.state, start.action));
    } else {
        const auto row = mixed.row(start.state);
        steps.emplace_back(row.begin(), row.end());
    }
    for (int k = 1; k < n_steps; ++k) {
        const std::vector<double>& prev = steps.back();
        std::vector<double> next(n, 0.0);
        for (int i = 0; i < n; ++i) {
            const double w = prev[i];
            if (w == 0.0) continue;
            const auto row = mixed.row(i);
            for (int j = 0; j < n; ++j) next[j] += w * row[j];
        }
        steps.push_back(std::move(next));
    }
    return steps;
}

std::vector<double> n_step_distribution(const GammaModelTable& model, const PolicyTable& policy,
                                        RolloutStart start, int n) {
    auto steps = n_step_sequence(model, policy, start, n);
    return std::move(steps.back());
}

ReweightedDistribution reweighted_distribution(const GammaModelTable& model,
                                               const PolicyTable& policy, RolloutStart start,
                                               double gamma_tilde, int horizon) {
    const RolloutWeights weights = rollout_weights(model.gamma(), gamma_tilde, horizon);
    const auto steps = n_step_sequence(model, policy, start, horizon);
    ReweightedDistribution result;
    result.tail_mass = weights.tail_mass;
    result.distribution.assign(model.n_states(), 0.0);
    for (int k = 0; k < horizon; ++k) {
        const double alpha = weights.alphas[k];
        if (alpha == 0.0) continue;
        const auto& mu = steps[k];
        for (int j = 0; j < model.n_states(); ++j) result.distribution[j] += alpha * mu[j];
    }
    return result;
}

int steps_to_mass(double gamma, double gamma_tilde, double coverage) {
    check_discounts(gamma, gamma_tilde);
    if (!(coverage > 0.0 && coverage < 1.0))
        throw std::invalid_argument("steps_to_mass: coverage must lie in (0, 1)");
    const double ratio = (gamma_tilde - gamma) / (1.0 - gamma);
    const double residue = 1.0 - coverage;
    if (ratio <= residue) return 1;  // covers ratio == 0 (gamma == gamma_tilde)
    // closed form, then verify the integer boundary exactly
    int h = static_cast<int>(std::ceil(std::log(residue) / std::log(ratio)));
    h = std::max(h, 1);
    while (std::pow(ratio, h) > residue) ++h;
    while (h > 1 && std::pow(ratio, h - 1) <= residue) --h;
    return h;
}

std::vector<int> sample_rollout(const GammaModelTable& model, const PolicyTable& policy,
                                int start_state, int horizon, Rng& rng) {
    if (horizon < 1) throw std::invalid_argument("sample_rollout: horizon must be >= 1");
    check_start(model, RolloutStart::from_state(start_state));
    if (policy.n_states != model.n_states() || policy.n_actions != model.n_actions())
        throw std::invalid_argument("sample_rollout: policy dimensions mismatch");
    std::vector<int> states(horizon);
    std::vector<double> row(model.n_states());
    int current = start_state;
    for (int k = 0; k < horizon; ++k) {
        // drawing a ~ pi then s ~ mu(.|current, a) samples the
        // state-conditioned row
        const int action = rng.categorical(policy.row(current));
        model.probabilities(current, action, row);
        current = rng.categorical(row);
        states[k] = current;
    }
    return states;
}

}  // namespace gm
