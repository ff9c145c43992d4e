#pragma once

#include <span>
#include <vector>

#include "gammamodel/envs.hpp"
#include "gammamodel/matrix.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

/// Expected discounted visitation counts M(s_e | s, a); every row sums to
/// 1/(1-gamma).
struct SuccessorTable {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    std::vector<double> m;  // [s][a][s_e]

    std::span<const double> row(int s, int a) const {
        return {m.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
                static_cast<std::size_t>(n_states)};
    }
};

/// Discounted state occupancy mu(s_e | s, a); rows are probability
/// distributions, mu = (1-gamma) * M.
struct OccupancyTable {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    std::vector<double> mu;  // [s][a][s_e]

    std::span<const double> row(int s, int a) const {
        return {mu.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
                static_cast<std::size_t>(n_states)};
    }
};

/// Exact successor representation by dense linear solve:
/// M[s][a] = row of P_a (I - gamma P_pi)^{-1}. Requires gamma in [0, 1).
SuccessorTable exact_successor(const TabularMdp& mdp, const PolicyTable& policy, double gamma);

/// Exact discounted occupancy, the (1-gamma)-normalized successor
/// representation. Rows are exact distributions and satisfy the one-step
/// bootstrap fixed point.
OccupancyTable exact_occupancy(const TabularMdp& mdp, const PolicyTable& policy, double gamma);

/// Max elementwise residual of the successor recurrence
/// M(s_e|s,a) = E_{s'}[ 1{s_e = s'} + gamma M(s_e|s') ].
double successor_recurrence_residual(const TabularMdp& mdp, const PolicyTable& policy,
                                     const SuccessorTable& table);

/// Max elementwise residual of the occupancy fixed point
/// mu(.|s,a) = (1-gamma) p(.|s,a) + gamma sum_{s'} p(s'|s,a) mu_pi(.|s').
double occupancy_fixed_point_residual(const TabularMdp& mdp, const PolicyTable& policy,
                                      const OccupancyTable& table);

/// Max elementwise |mu - (1-gamma) M|.
double proposition1_residual(const OccupancyTable& occupancy, const SuccessorTable& successor);

/// Empirical exit-state distribution from (s, a): draws a termination time
/// Delta_t ~ Geom(1-gamma) with support >= 1 (inverse CDF, exact), rolls the
/// chain that many steps (action a first, then the policy) and records the
/// final state. Returns normalized counts.
std::vector<double> monte_carlo_occupancy(const TabularMdp& mdp, const PolicyTable& policy,
                                          double gamma, int s, int a, long n_samples, Rng& rng);

/// Discretized-environment variant: rolls the true continuous dynamics and
/// records the exit state's bin index.
std::vector<double> monte_carlo_occupancy(EnvId env, const DiscretizationSpec& spec,
                                          const PolicyTable& policy, double gamma,
                                          const ContinuousEnvState& start, int a, long n_samples,
                                          Rng& rng);

struct PolicyEvaluation {
    std::vector<double> v;  // V(s)
    Matrix q;               // Q(s, a)
};

/// Exact policy evaluation under the exit-state reward convention:
/// Q(s,a) = sum_{s'} p(s'|s,a) (r(s') + gamma V(s')), V solved densely.
PolicyEvaluation policy_evaluation(const TabularMdp& mdp, const PolicyTable& policy, double gamma);

struct ValueIterationResult {
    std::vector<double> v;
    std::vector<int> greedy_actions;  // argmax with lowest-index tie-breaking
    PolicyTable greedy_policy;
    long iterations = 0;
};

/// Value iteration to a sup-norm Bellman residual below tolerance.
ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma, double tolerance);

}  // namespace gm
