#include "gammamodel/mdp.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

namespace gm {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string format_violation(const char* fmt, ...) {
    char buf[160];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

PolicyTable PolicyTable::uniform(int n_states, int n_actions) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("uniform policy: counts must be positive");
    PolicyTable policy(n_states, n_actions, 1.0 / n_actions);
    return policy;
}

PolicyTable PolicyTable::deterministic(std::span<const int> actions, int n_actions) {
    PolicyTable policy(static_cast<int>(actions.size()), n_actions, 0.0);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] < 0 || actions[s] >= n_actions)
            throw std::invalid_argument("deterministic policy: action index out of bounds");
        policy.row(static_cast<int>(s))[actions[s]] = 1.0;
    }
    return policy;
}

std::vector<std::string> validate_mdp(const TabularMdp& mdp) {
    std::vector<std::string> violations;
    if (mdp.n_states < 1 || mdp.n_actions < 1) {
        violations.push_back("state/action counts must be positive");
        return violations;
    }
    const auto expected =
        static_cast<std::size_t>(mdp.n_states) * mdp.n_actions * mdp.n_states;
    if (mdp.transition.size() != expected) {
        violations.push_back(format_violation("transition tensor has %zu entries, expected %zu",
                                              mdp.transition.size(), expected));
        return violations;
    }
    if (mdp.reward.size() != static_cast<std::size_t>(mdp.n_states)) {
        violations.push_back(format_violation("reward vector has %zu entries, expected %d",
                                              mdp.reward.size(), mdp.n_states));
        return violations;
    }
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            const auto row = mdp.transition_row(s, a);
            double sum = 0.0;
            for (int j = 0; j < mdp.n_states; ++j) {
                const double p = row[j];
                if (!(p >= 0.0))
                    violations.push_back(format_violation(
                        "negative entry %g at (s=%d,a=%d,s_next=%d)", p, s, a, j));
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                violations.push_back(
                    format_violation("row sum %.17g at (s=%d,a=%d)", sum, s, a));
        }
    }
    for (int s = 0; s < mdp.n_states; ++s) {
        if (!std::isfinite(mdp.reward[s]))
            violations.push_back(format_violation("non-finite reward at s=%d", s));
    }
    return violations;
}

std::vector<std::string> validate_policy(const PolicyTable& policy) {
    std::vector<std::string> violations;
    if (policy.n_states < 1 || policy.n_actions < 1) {
        violations.push_back("state/action counts must be positive");
        return violations;
    }
    if (policy.probs.size() !=
        static_cast<std::size_t>(policy.n_states) * policy.n_actions) {
        violations.push_back("probability matrix size mismatch");
        return violations;
    }
    for (int s = 0; s < policy.n_states; ++s) {
        double sum = 0.0;
        for (int a = 0; a < policy.n_actions; ++a) {
            const double p = policy.row(s)[a];
            if (!(p >= 0.0))
                violations.push_back(
                    format_violation("negative entry %g at (s=%d,a=%d)", p, s, a));
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            violations.push_back(format_violation("row sum %.17g at (s=%d)", sum, s));
    }
    return violations;
}

Matrix policy_transition_matrix(const TabularMdp& mdp, const PolicyTable& policy) {
    if (policy.n_states != mdp.n_states || policy.n_actions != mdp.n_actions)
        throw std::invalid_argument("policy_transition_matrix: dimension mismatch");
    Matrix p(mdp.n_states, mdp.n_states, 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
        auto out = p.row(s);
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double w = policy.row(s)[a];
            if (w == 0.0) continue;
            const auto row = mdp.transition_row(s, a);
            for (int j = 0; j < mdp.n_states; ++j) out[j] += w * row[j];
        }
    }
    return p;
}

TabularMdp swap_chain_mdp() {
    TabularMdp mdp(2, 1);
    mdp.transition_row(0, 0)[1] = 1.0;
    mdp.transition_row(1, 0)[0] = 1.0;
    return mdp;
}

TabularMdp absorbing_chain_mdp(int length) {
    if (length < 2) throw std::invalid_argument("absorbing_chain_mdp: length must be >= 2");
    TabularMdp mdp(length, 1);
    for (int s = 0; s + 1 < length; ++s) mdp.transition_row(s, 0)[s + 1] = 1.0;
    mdp.transition_row(length - 1, 0)[length - 1] = 1.0;
    mdp.reward[length - 1] = 1.0;
    return mdp;
}

TabularMdp random_mdp(int n_states, int n_actions, Rng& rng) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("random_mdp: counts must be positive");
    TabularMdp mdp(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            auto row = mdp.transition_row(s, a);
            double sum = 0.0;
            for (int j = 0; j < n_states; ++j) {
                row[j] = -std::log(rng.uniform_open());
                sum += row[j];
            }
            for (int j = 0; j < n_states; ++j) row[j] /= sum;
        }
    }
    for (int s = 0; s < n_states; ++s) mdp.reward[s] = 2.0 * rng.uniform() - 1.0;
    return mdp;
}

PolicyTable random_policy(int n_states, int n_actions, Rng& rng) {
    PolicyTable policy(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        auto row = policy.row(s);
        double sum = 0.0;
        for (int a = 0; a < n_actions; ++a) {
            row[a] = -std::log(rng.uniform_open());
            sum += row[a];
        }
        for (int a = 0; a < n_actions; ++a) row[a] /= sum;
    }
    return policy;
}

}  // namespace gm
