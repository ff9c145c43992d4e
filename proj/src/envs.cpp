#include "gammamodel/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gm {

namespace {

constexpr double kPi = std::numbers::pi;

// pendulum constants
constexpr double kDt = 0.05;
constexpr double kGravity = 10.0;
constexpr double kMass = 1.0;
constexpr double kLength = 1.0;
constexpr double kMaxTorque = 2.0;
constexpr double kMaxSpeed = 8.0;

// mountain car constants
constexpr double kMcPower = 0.0015;
constexpr double kMcGravity = 0.0025;
constexpr double kMcMinX = -1.2;
constexpr double kMcMaxX = 0.6;
constexpr double kMcMaxV = 0.07;
constexpr double kMcMaxU = 1.0;
constexpr double kMcGoalX = 0.45;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// wraps to [-pi, pi)
double wrap_angle(double theta) {
    return theta - 2.0 * kPi * std::floor((theta + kPi) / (2.0 * kPi));
}

void check_dimension(const ContinuousEnvState& state) {
    if (static_cast<int>(state.values.size()) != env_dimension(state.env))
        throw std::invalid_argument("environment state has wrong dimension");
}

// overlap fraction of [lo, hi] with a bin, for initial-state mass
double overlap_fraction(double lo, double hi, double bin_lo, double bin_hi) {
    const double inter = std::min(hi, bin_hi) - std::max(lo, bin_lo);
    if (inter <= 0.0) return 0.0;
    return inter / (hi - lo);
}

}  // namespace

EnvId env_from_name(std::string_view name) {
    if (name == "pendulum") return EnvId::pendulum;
    if (name == "mountain_car") return EnvId::mountain_car;
    throw std::invalid_argument("unknown environment identifier: " + std::string(name));
}

std::string_view env_name(EnvId env) {
    return env == EnvId::pendulum ? "pendulum" : "mountain_car";
}

int env_dimension(EnvId) { return 2; }

EnvStepResult env_step(const ContinuousEnvState& state, double action, Rng&) {
    check_dimension(state);
    if (state.env == EnvId::pendulum) {
        const double theta = state.values[0];
        const double theta_dot = state.values[1];
        const double u = clamp(action, -kMaxTorque, kMaxTorque);
        double new_dot = theta_dot +
                         (3.0 * kGravity / (2.0 * kLength) * std::sin(theta) +
                          3.0 / (kMass * kLength * kLength) * u) *
                             kDt;
        new_dot = clamp(new_dot, -kMaxSpeed, kMaxSpeed);
        const double new_theta = wrap_angle(theta + new_dot * kDt);
        const double reward =
            -(new_theta * new_theta + 0.1 * new_dot * new_dot + 0.001 * u * u);
        return {{EnvId::pendulum, {new_theta, new_dot}}, reward};
    }
    const double x = state.values[0];
    const double v = state.values[1];
    if (x >= kMcGoalX) {
        // goal reached: absorbing
        return {state, x};
    }
    const double u = clamp(action, -kMcMaxU, kMcMaxU);
    double new_v = clamp(v + u * kMcPower - kMcGravity * std::cos(3.0 * x), -kMcMaxV, kMcMaxV);
    double new_x = clamp(x + new_v, kMcMinX, kMcMaxX);
    if (new_x <= kMcMinX && new_v < 0.0) new_v = 0.0;
    return {{EnvId::mountain_car, {new_x, new_v}}, new_x};
}

ContinuousEnvState env_initial_state(EnvId env, Rng& rng) {
    if (env == EnvId::pendulum) {
        const double theta = -kPi + 2.0 * kPi * rng.uniform();
        const double theta_dot = -1.0 + 2.0 * rng.uniform();
        return {EnvId::pendulum, {theta, theta_dot}};
    }
    const double x = -0.6 + 0.2 * rng.uniform();
    return {EnvId::mountain_car, {x, 0.0}};
}

double env_state_reward(EnvId env, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(env_dimension(env)))
        throw std::invalid_argument("environment state has wrong dimension");
    if (env == EnvId::pendulum) {
        const double theta = wrap_angle(values[0]);
        return -(theta * theta + 0.1 * values[1] * values[1]);
    }
    return values[0];
}

std::vector<double> env_action_grid(EnvId env, int n_actions) {
    if (n_actions < 1) throw std::invalid_argument("action grid needs at least one action");
    const double hi = env == EnvId::pendulum ? kMaxTorque : kMcMaxU;
    const double lo = -hi;
    std::vector<double> actions(n_actions);
    if (n_actions == 1) {
        actions[0] = 0.5 * (lo + hi);
        return actions;
    }
    for (int i = 0; i < n_actions; ++i)
        actions[i] = lo + (hi - lo) * static_cast<double>(i) / (n_actions - 1);
    return actions;
}

DiscretizationSpec default_discretization(EnvId env, std::span<const int> bins, int n_actions) {
    if (static_cast<int>(bins.size()) != env_dimension(env))
        throw std::invalid_argument("one bin count per state dimension required");
    DiscretizationSpec spec;
    if (env == EnvId::pendulum) {
        spec.dims = {{-kPi, kPi, bins[0]}, {-kMaxSpeed, kMaxSpeed, bins[1]}};
    } else {
        spec.dims = {{kMcMinX, kMcMaxX, bins[0]}, {-kMcMaxV, kMcMaxV, bins[1]}};
    }
    for (const auto& d : spec.dims)
        if (d.bins < 1) throw std::invalid_argument("bin count must be >= 1");
    spec.actions = env_action_grid(env, n_actions);
    return spec;
}

int discretize(std::span<const double> values, const DiscretizationSpec& spec) {
    if (values.size() != spec.dims.size())
        throw std::invalid_argument("discretize: dimension mismatch");
    int index = 0;
    for (std::size_t d = 0; d < spec.dims.size(); ++d) {
        const auto& dim = spec.dims[d];
        const double t = (values[d] - dim.lo) / (dim.hi - dim.lo);
        int bin = static_cast<int>(std::floor(t * dim.bins));
        bin = std::min(std::max(bin, 0), dim.bins - 1);
        index = index * dim.bins + bin;
    }
    return index;
}

int discretize(const ContinuousEnvState& state, const DiscretizationSpec& spec) {
    check_dimension(state);
    return discretize(std::span<const double>(state.values), spec);
}

std::vector<double> bin_center(int index, const DiscretizationSpec& spec) {
    const int n = spec.n_states();
    if (index < 0 || index >= n) throw std::invalid_argument("bin_center: index out of range");
    std::vector<double> center(spec.dims.size());
    for (std::size_t d = spec.dims.size(); d-- > 0;) {
        const auto& dim = spec.dims[d];
        const int bin = index % dim.bins;
        index /= dim.bins;
        const double width = (dim.hi - dim.lo) / dim.bins;
        center[d] = dim.lo + (bin + 0.5) * width;
    }
    return center;
}

TabularMdp discretized_mdp(EnvId env, const DiscretizationSpec& spec) {
    const int n_states = spec.n_states();
    const int n_actions = spec.n_actions();
    if (n_actions < 1) throw std::invalid_argument("discretized_mdp: empty action grid");
    TabularMdp mdp(n_states, n_actions);
    Rng unused(0);
    for (int s = 0; s < n_states; ++s) {
        const ContinuousEnvState state{env, bin_center(s, spec)};
        mdp.reward[s] = env_state_reward(env, state.values);
        for (int a = 0; a < n_actions; ++a) {
            const auto result = env_step(state, spec.actions[a], unused);
            mdp.transition_row(s, a)[discretize(result.next, spec)] = 1.0;
        }
    }
    return mdp;
}

std::vector<double> discretized_initial_dist(EnvId env, const DiscretizationSpec& spec) {
    // per-dimension ranges of the uniform reset distribution
    std::vector<std::pair<double, double>> ranges;
    if (env == EnvId::pendulum) {
        ranges = {{-kPi, kPi}, {-1.0, 1.0}};
    } else {
        ranges = {{-0.6, -0.4}, {0.0, 0.0}};
    }
    std::vector<std::vector<double>> per_dim(spec.dims.size());
    for (std::size_t d = 0; d < spec.dims.size(); ++d) {
        const auto& dim = spec.dims[d];
        per_dim[d].resize(dim.bins, 0.0);
        const double width = (dim.hi - dim.lo) / dim.bins;
        const auto [lo, hi] = ranges[d];
        if (hi <= lo) {
            // point mass
            const int bin = std::min(std::max(static_cast<int>(std::floor(
                                                  (lo - dim.lo) / (dim.hi - dim.lo) * dim.bins)),
                                              0),
                                     dim.bins - 1);
            per_dim[d][bin] = 1.0;
            continue;
        }
        double sum = 0.0;
        for (int b = 0; b < dim.bins; ++b) {
            per_dim[d][b] =
                overlap_fraction(lo, hi, dim.lo + b * width, dim.lo + (b + 1) * width);
            sum += per_dim[d][b];
        }
        // clamp residue (mass outside the box) onto the edge bins
        if (sum < 1.0) {
            per_dim[d][0] += overlap_fraction(lo, hi, -1e300, dim.lo);
            per_dim[d].back() += overlap_fraction(lo, hi, dim.hi, 1e300);
        }
    }
    const int n_states = spec.n_states();
    std::vector<double> dist(n_states, 0.0);
    for (int s = 0; s < n_states; ++s) {
        int rest = s;
        double mass = 1.0;
        for (std::size_t d = spec.dims.size(); d-- > 0;) {
            const int bin = rest % spec.dims[d].bins;
            rest /= spec.dims[d].bins;
            mass *= per_dim[d][bin];
        }
        dist[s] = mass;
    }
    return dist;
}

GridworldMdp gridworld_mdp(int size) {
    if (size < 2) throw std::invalid_argument("gridworld_mdp: size must be >= 2");
    const int n = size * size;
    GridworldMdp grid;
    grid.size = size;
    grid.goal_state = n - 1;
    grid.mdp = TabularMdp(n, 4);
    // actions: 0 up, 1 down, 2 left, 3 right; walls absorb motion
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const int s = r * size + c;
            for (int a = 0; a < 4; ++a) {
                int nr = r + dr[a];
                int nc = c + dc[a];
                if (nr < 0 || nr >= size || nc < 0 || nc >= size) {
                    nr = r;
                    nc = c;
                }
                int next = nr * size + nc;
                if (s == grid.goal_state) next = grid.goal_state;
                grid.mdp.transition_row(s, a)[next] = 1.0;
            }
        }
    }
    grid.mdp.reward[grid.goal_state] = 1.0;
    grid.initial_dist.assign(n, 1.0 / (n - 1));
    grid.initial_dist[grid.goal_state] = 0.0;
    return grid;
}

MdpSimulator::MdpSimulator(const TabularMdp& mdp, std::span<const double> initial_dist)
    : mdp_(mdp) {
    if (initial_dist.empty()) {
        initial_.assign(mdp.n_states, 1.0 / mdp.n_states);
    } else {
        if (static_cast<int>(initial_dist.size()) != mdp.n_states)
            throw std::invalid_argument("initial distribution has wrong size");
        initial_.assign(initial_dist.begin(), initial_dist.end());
    }
}

int MdpSimulator::reset(Rng& rng) {
    state_ = rng.categorical(initial_);
    return state_;
}

std::pair<int, double> MdpSimulator::step(int action, Rng& rng) {
    if (action < 0 || action >= mdp_.n_actions)
        throw std::invalid_argument("step: action index out of bounds");
    const int next = rng.categorical(mdp_.transition_row(state_, action));
    state_ = next;
    return {next, mdp_.reward[next]};
}

DiscretizedSimulator::DiscretizedSimulator(EnvId env, DiscretizationSpec spec)
    : env_(env), spec_(std::move(spec)), state_{env, std::vector<double>(2, 0.0)} {}

int DiscretizedSimulator::reset(Rng& rng) {
    state_ = env_initial_state(env_, rng);
    return discretize(state_, spec_);
}

std::pair<int, double> DiscretizedSimulator::step(int action, Rng& rng) {
    if (action < 0 || action >= spec_.n_actions())
        throw std::invalid_argument("step: action index out of bounds");
    auto result = env_step(state_, spec_.actions[action], rng);
    state_ = std::move(result.next);
    return {discretize(state_, spec_), result.reward};
}

}  // namespace gm
