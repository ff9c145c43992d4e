#pragma once

#include <span>

#include "gammamodel/gamma_td.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/rollout.hpp"

namespace gm {

/// Value estimate decomposed into the weighted model-step term and the
/// terminal value term; value = model_term + terminal_term.
struct ValueEstimate {
    double value = 0.0;
    double model_term = 0.0;
    double terminal_term = 0.0;
    int horizon = 0;
    double gamma = 0.0;
    double gamma_tilde = 0.0;
};

/// Q from a single model pass: (1/(1-gamma)) * E_{s_e ~ mu(.|s,a)}[r(s_e)].
double q_from_model(const GammaModelTable& model, std::span<const double> reward, int s, int a);

/// Standard model-based value expansion with exact n-step kernels:
/// V = sum_{n=1}^{H} gt^{n-1} E[r(s_{t+n})] + gt^H E[V(s_{t+H})].
/// H = 0 returns V(s).
double mve_estimate(const TabularMdp& mdp, const PolicyTable& policy, std::span<const double> v,
                    int s, int horizon, double gamma_tilde);

/// Same expansion driven by a single-step (gamma = 0) model table instead of
/// the true kernel.
double mve_estimate(const GammaModelTable& single_step_model, const PolicyTable& policy,
                    std::span<const double> reward, std::span<const double> v, int s, int horizon,
                    double gamma_tilde);

/// Probabilistic-horizon value expansion:
/// V = (1/(1-gt)) sum_{n=1}^{H} alpha_n E_{mu_n}[r]
///     + ((gt-g)/(1-g))^H E_{mu_H}[V].
/// With the exact occupancy as model and the exact gamma_tilde value
/// function, this is an identity for every H >= 1. Requires
/// gamma_tilde >= model gamma and H >= 1.
ValueEstimate gamma_mve_estimate(const GammaModelTable& model, const PolicyTable& policy,
                                 std::span<const double> reward, std::span<const double> v, int s,
                                 int horizon, double gamma_tilde);

/// Monte Carlo variant: one sampled rollout supplies the per-step exit
/// states; unbiased for the expected estimator above.
ValueEstimate gamma_mve_estimate_sampled(const GammaModelTable& model, const PolicyTable& policy,
                                         std::span<const double> reward, std::span<const double> v,
                                         int s, int horizon, double gamma_tilde, Rng& rng);

/// Closed-form weight on the terminal value function,
/// ((gt-g)/(1-g))^H = 1 - sum_{n=1}^{H} alpha_n.
double terminal_weight(double gamma, double gamma_tilde, int horizon);

/// Single-step MVE rollout length with the same terminal weight as an
/// H-step probabilistic-horizon expansion: the real solution of
/// gt^{H'} = ((gt-g)/(1-g))^H plus its nearest-integer rounding.
struct EffectiveHorizon {
    double real_horizon = 0.0;
    int rounded = 0;
    bool infinite = false;  // gamma == gamma_tilde
};

EffectiveHorizon effective_horizon_match(double gamma, double gamma_tilde, int horizon);

}  // namespace gm
