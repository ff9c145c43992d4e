#pragma once

#include <span>
#include <string>
#include <vector>

#include "gammamodel/matrix.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

/// Finite MDP with a state-indexed reward vector. Transition probabilities
/// are stored flat in [state][action][next_state] order; every (s, a) row is
/// a distribution over next states.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;  // [s][a][s'], rows sum to 1
    std::vector<double> reward;      // r(s)

    TabularMdp() = default;
    TabularMdp(int states, int actions)
        : n_states(states),
          n_actions(actions),
          transition(static_cast<std::size_t>(states) * actions * states, 0.0),
          reward(states, 0.0) {}

    std::span<double> transition_row(int s, int a) {
        return {transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
                static_cast<std::size_t>(n_states)};
    }
    std::span<const double> transition_row(int s, int a) const {
        return {transition.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
                static_cast<std::size_t>(n_states)};
    }
};

/// Stochastic policy over a finite MDP; probs[s][a] with unit row sums.
struct PolicyTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> probs;  // [s][a]

    PolicyTable() = default;
    PolicyTable(int states, int actions, double fill = 0.0)
        : n_states(states),
          n_actions(actions),
          probs(static_cast<std::size_t>(states) * actions, fill) {}

    std::span<double> row(int s) {
        return {probs.data() + static_cast<std::size_t>(s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }
    std::span<const double> row(int s) const {
        return {probs.data() + static_cast<std::size_t>(s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }

    static PolicyTable uniform(int n_states, int n_actions);
    /// One-hot policy from an action index per state.
    static PolicyTable deterministic(std::span<const int> actions, int n_actions);
};

/// Checks the TabularMdp invariants. Returns one human-readable violation per
/// defect (empty means valid); each message names the offending index and the
/// residual. Diagnostic only, never throws.
std::vector<std::string> validate_mdp(const TabularMdp& mdp);

/// Row-sum / negativity checks for a policy, same reporting style.
std::vector<std::string> validate_policy(const PolicyTable& policy);

/// One-step state kernel under a policy: P[s][s'] = sum_a pi(a|s) p(s'|s,a).
/// Throws on dimension mismatch; the result is row-stochastic.
Matrix policy_transition_matrix(const TabularMdp& mdp, const PolicyTable& policy);

/// Two-state chain whose single action deterministically swaps the states.
/// The smallest testbed with a nontrivial discounted occupancy.
TabularMdp swap_chain_mdp();

/// Directed chain 0 -> 1 -> ... -> n-1 with an absorbing last state carrying
/// reward 1; single action.
TabularMdp absorbing_chain_mdp(int length);

/// Random dense MDP: transition rows are normalized exponentials (flat
/// Dirichlet) and rewards are uniform in [-1, 1].
TabularMdp random_mdp(int n_states, int n_actions, Rng& rng);

/// Random stochastic policy with Dirichlet rows.
PolicyTable random_policy(int n_states, int n_actions, Rng& rng);

}  // namespace gm
