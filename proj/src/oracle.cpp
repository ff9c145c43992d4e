#include "gammamodel/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gm {

namespace {

void check_inputs(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
    if (policy.n_states != mdp.n_states || policy.n_actions != mdp.n_actions)
        throw std::invalid_argument("oracle: policy dimensions mismatch");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("oracle: gamma must lie in [0, 1)");
}

Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const PolicyTable& policy) {
    const Matrix p = policy_transition_matrix(mdp, policy);
    Eigen::MatrixXd k(p.rows, p.cols);
    for (int s = 0; s < p.rows; ++s)
        for (int j = 0; j < p.cols; ++j) k(s, j) = p(s, j);
    return k;
}

// Delta_t ~ Geom(1-gamma) with support >= 1, by inverse CDF.
long sample_geometric_horizon(double gamma, Rng& rng) {
    if (gamma == 0.0) return 1;
    const double u = rng.uniform_open();
    return 1 + static_cast<long>(std::floor(std::log(u) / std::log(gamma)));
}

}  // namespace

SuccessorTable exact_successor(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
    check_inputs(mdp, policy, gamma);
    const int n = mdp.n_states;
    const int pairs = n * mdp.n_actions;

    // M rows solve (I - gamma P_pi)^T m^T = p(.|s,a): factor once, solve all
    // right-hand sides together.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - gamma * policy_kernel(mdp, policy);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.transpose());

    Eigen::MatrixXd rhs(n, pairs);
    for (int s = 0; s < n; ++s)
        for (int act = 0; act < mdp.n_actions; ++act) {
            const auto row = mdp.transition_row(s, act);
            const int k = s * mdp.n_actions + act;
            for (int j = 0; j < n; ++j) rhs(j, k) = row[j];
        }
    const Eigen::MatrixXd solved = lu.solve(rhs);

    SuccessorTable table;
    table.n_states = n;
    table.n_actions = mdp.n_actions;
    table.gamma = gamma;
    table.m.resize(static_cast<std::size_t>(pairs) * n);
    for (int k = 0; k < pairs; ++k)
        for (int j = 0; j < n; ++j)
            table.m[static_cast<std::size_t>(k) * n + j] = solved(j, k);
    return table;
}

OccupancyTable exact_occupancy(const TabularMdp& mdp, const PolicyTable& policy, double gamma) {
    const SuccessorTable successor = exact_successor(mdp, policy, gamma);
    OccupancyTable table;
    table.n_states = successor.n_states;
    table.n_actions = successor.n_actions;
    table.gamma = gamma;
    table.mu.resize(successor.m.size());
    const double scale = 1.0 - gamma;
    for (std::size_t i = 0; i < successor.m.size(); ++i) table.mu[i] = scale * successor.m[i];
    return table;
}

double successor_recurrence_residual(const TabularMdp& mdp, const PolicyTable& policy,
                                     const SuccessorTable& table) {
    const int n = mdp.n_states;
    // policy-mixed successor rows M_pi(.|s') = sum_a pi(a|s') M(.|s',a)
    Matrix mixed(n, n, 0.0);
    for (int s = 0; s < n; ++s) {
        auto out = mixed.row(s);
        for (int a = 0; a < mdp.n_actions; ++a) {
            const double w = policy.row(s)[a];
            if (w == 0.0) continue;
            const auto row = table.row(s, a);
            for (int j = 0; j < n; ++j) out[j] += w * row[j];
        }
    }
    double residual = 0.0;
    std::vector<double> expected(n);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            std::fill(expected.begin(), expected.end(), 0.0);
            const auto p = mdp.transition_row(s, a);
            for (int next = 0; next < n; ++next) {
                const double w = p[next];
                if (w == 0.0) continue;
                expected[next] += w;
                const auto mrow = mixed.row(next);
                for (int j = 0; j < n; ++j) expected[j] += w * table.gamma * mrow[j];
            }
            const auto actual = table.row(s, a);
            for (int j = 0; j < n; ++j)
                residual = std::max(residual, std::abs(actual[j] - expected[j]));
        }
    }
    return residual;
}

double occupancy_fixed_point_residual(const TabularMdp& mdp, const PolicyTable& policy,
                                      const OccupancyTable& table) {
    SuccessorTable scaled;
    scaled.n_states = table.n_states;
    scaled.n_actions = table.n_actions;
    scaled.gamma = table.gamma;
    scaled.m.resize(table.mu.size());
    const double inv = 1.0 / (1.0 - table.gamma);
    for (std::size_t i = 0; i < table.mu.size(); ++i) scaled.m[i] = inv * table.mu[i];
    // mu = (1-gamma) M, so the fixed-point residual is the successor
    // recurrence residual scaled back down.
    return (1.0 - table.gamma) * successor_recurrence_residual(mdp, policy, scaled);
}

double proposition1_residual(const OccupancyTable& occupancy, const SuccessorTable& successor) {
    if (occupancy.mu.size() != successor.m.size())
        throw std::invalid_argument("proposition1_residual: shape mismatch");
    const double scale = 1.0 - occupancy.gamma;
    double residual = 0.0;
    for (std::size_t i = 0; i < occupancy.mu.size(); ++i)
        residual = std::max(residual, std::abs(occupancy.mu[i] - scale * successor.m[i]));
    return residual;
}

std::vector<double> monte_carlo_occupancy(const TabularMdp& mdp, const PolicyTable& policy,
                                          double gamma, int s, int a, long n_samples, Rng& rng) {
    check_inputs(mdp, policy, gamma);
    if (n_samples < 1) throw std::invalid_argument("monte_carlo_occupancy: n_samples >= 1");
    if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions)
        throw std::invalid_argument("monte_carlo_occupancy: index out of bounds");
    std::vector<double> counts(mdp.n_states, 0.0);
    for (long i = 0; i < n_samples; ++i) {
        const long horizon = sample_geometric_horizon(gamma, rng);
        int state = rng.categorical(mdp.transition_row(s, a));
        for (long t = 1; t < horizon; ++t) {
            const int action = rng.categorical(policy.row(state));
            state = rng.categorical(mdp.transition_row(state, action));
        }
        counts[state] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(n_samples);
    return counts;
}

std::vector<double> monte_carlo_occupancy(EnvId env, const DiscretizationSpec& spec,
                                          const PolicyTable& policy, double gamma,
                                          const ContinuousEnvState& start, int a, long n_samples,
                                          Rng& rng) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("monte_carlo_occupancy: gamma must lie in [0, 1)");
    if (n_samples < 1) throw std::invalid_argument("monte_carlo_occupancy: n_samples >= 1");
    if (start.env != env)
        throw std::invalid_argument("monte_carlo_occupancy: start state belongs to another env");
    if (a < 0 || a >= spec.n_actions())
        throw std::invalid_argument("monte_carlo_occupancy: action out of bounds");
    std::vector<double> counts(spec.n_states(), 0.0);
    for (long i = 0; i < n_samples; ++i) {
        const long horizon = sample_geometric_horizon(gamma, rng);
        ContinuousEnvState state = env_step(start, spec.actions[a], rng).next;
        for (long t = 1; t < horizon; ++t) {
            const int action = rng.categorical(policy.row(discretize(state, spec)));
            state = env_step(state, spec.actions[action], rng).next;
        }
        counts[discretize(state, spec)] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(n_samples);
    return counts;
}

PolicyEvaluation policy_evaluation(const TabularMdp& mdp, const PolicyTable& policy,
                                   double gamma) {
    check_inputs(mdp, policy, gamma);
    const int n = mdp.n_states;
    const Eigen::MatrixXd kernel = policy_kernel(mdp, policy);
    Eigen::VectorXd reward(n);
    for (int s = 0; s < n; ++s) reward(s) = mdp.reward[s];

    // V = P_pi (r + gamma V): rewards accrue on the states being entered
    const Eigen::VectorXd b = kernel * reward;
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - gamma * kernel;
    const Eigen::VectorXd v = a.partialPivLu().solve(b);

    PolicyEvaluation result;
    result.v.assign(v.data(), v.data() + n);
    result.q = Matrix(n, mdp.n_actions, 0.0);
    for (int s = 0; s < n; ++s)
        for (int act = 0; act < mdp.n_actions; ++act) {
            const auto row = mdp.transition_row(s, act);
            double q = 0.0;
            for (int j = 0; j < n; ++j) {
                if (row[j] == 0.0) continue;
                q += row[j] * (mdp.reward[j] + gamma * result.v[j]);
            }
            result.q(s, act) = q;
        }
    return result;
}

ValueIterationResult value_iteration(const TabularMdp& mdp, double gamma, double tolerance) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("value_iteration: gamma must lie in [0, 1)");
    if (!(tolerance > 0.0)) throw std::invalid_argument("value_iteration: tolerance must be > 0");
    const int n = mdp.n_states;
    std::vector<double> v(n, 0.0);
    std::vector<double> next(n, 0.0);
    ValueIterationResult result;
    result.greedy_actions.assign(n, 0);

    const long max_iterations = 100000000;
    for (long it = 0; it < max_iterations; ++it) {
        double delta = 0.0;
        for (int s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions; ++a) {
                const auto row = mdp.transition_row(s, a);
                double q = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (row[j] == 0.0) continue;
                    q += row[j] * (mdp.reward[j] + gamma * v[j]);
                }
                if (q > best) best = q;
            }
            next[s] = best;
            delta = std::max(delta, std::abs(next[s] - v[s]));
        }
        std::swap(v, next);
        result.iterations = it + 1;
        // returned V is one application past the stopping test, so its
        // Bellman residual is at most gamma * delta <= tolerance
        if (delta <= tolerance) break;
        if (it + 1 == max_iterations)
            throw std::runtime_error("value_iteration: did not converge");
    }
    // greedy extraction from the final V, lowest action index on ties
    for (int s = 0; s < n; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_action = 0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            const auto row = mdp.transition_row(s, a);
            double q = 0.0;
            for (int j = 0; j < n; ++j) {
                if (row[j] == 0.0) continue;
                q += row[j] * (mdp.reward[j] + gamma * v[j]);
            }
            if (q > best) {
                best = q;
                best_action = a;
            }
        }
        result.greedy_actions[s] = best_action;
    }
    result.v = std::move(v);
    result.greedy_policy =
        PolicyTable::deterministic(result.greedy_actions, mdp.n_actions);
    return result;
}

}  // namespace gm
