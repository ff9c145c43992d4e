#pragma once

#include <vector>

#include "gammamodel/gamma_td.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

/// Mixture weights that reweight an H-step rollout of a gamma-model into the
/// occupancy of a larger target discount:
///   alpha_n = (1-gt) (gt-g)^{n-1} / (1-g)^n,
/// with the unassigned tail mass ((gt-g)/(1-g))^H.
struct RolloutWeights {
    double gamma = 0.0;
    double gamma_tilde = 0.0;
    int horizon = 0;
    std::vector<double> alphas;  // alpha_1 .. alpha_H
    double tail_mass = 0.0;
};

/// Requires 0 <= gamma <= gamma_tilde < 1 and H >= 1.
RolloutWeights rollout_weights(double gamma, double gamma_tilde, int horizon);

/// Probability that n chained geometric-horizon model steps land at
/// cumulative timestep t: p_n(t) = C(t-1, t-n) gamma^{t-n} (1-gamma)^n for
/// t >= n, zero below. Binomial coefficients use an exact product when they
/// fit a double and log-space otherwise, keeping the pmf stable for t up to
/// ~1e4.
double negative_binomial_pmf(int n, double gamma, long t);

/// q(t) = sum_{n<=min(t,H)} alpha_n p_n(t) for t = 1..t_max; equals the
/// geometric pmf (1-gt) gt^{t-1} exactly for t <= H.
std::vector<double> timestep_mixture(double gamma, double gamma_tilde, int horizon, long t_max);

/// Rollout start: from a state (policy-mixed first step) or from a specific
/// (state, action) pair.
struct RolloutStart {
    int state = 0;
    int action = -1;  // < 0 means state-conditioned

    static RolloutStart from_state(int s) { return {s, -1}; }
    static RolloutStart from_state_action(int s, int a) { return {s, a}; }
    bool has_action() const { return action >= 0; }
};

/// Distributions over states at rollout steps 1..n_steps: mu_1 is the model
/// row (policy-mixed for state starts), mu_n = mu_{n-1} composed with the
/// state-conditioned kernel.
std::vector<std::vector<double>> n_step_sequence(const GammaModelTable& model,
                                                 const PolicyTable& policy, RolloutStart start,
                                                 int n_steps);

std::vector<double> n_step_distribution(const GammaModelTable& model, const PolicyTable& policy,
                                        RolloutStart start, int n);

struct ReweightedDistribution {
    std::vector<double> distribution;  // sum_{n=1}^{H} alpha_n mu_n, mass 1 - tail
    double tail_mass = 0.0;
};

/// Truncated reweighting toward the gamma_tilde occupancy. The tail mass is
/// reported, not renormalized; callers decide what to do with it.
ReweightedDistribution reweighted_distribution(const GammaModelTable& model,
                                               const PolicyTable& policy, RolloutStart start,
                                               double gamma_tilde, int horizon);

/// Smallest H whose first-H weights cover at least `coverage` of the mass,
/// i.e. the smallest H with ((gt-g)/(1-g))^H <= 1 - coverage. Solved in
/// closed form with an integer verification step. gamma == gamma_tilde
/// returns 1.
int steps_to_mass(double gamma, double gamma_tilde, double coverage);

/// Samples an H-step rollout; each step draws from the state-conditioned
/// model row of the previous sample. Deterministic for a given rng.
std::vector<int> sample_rollout(const GammaModelTable& model, const PolicyTable& policy,
                                int start_state, int horizon, Rng& rng);

}  // namespace gm
