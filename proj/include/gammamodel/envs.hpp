#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gammamodel/mdp.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

enum class EnvId { pendulum, mountain_car };

EnvId env_from_name(std::string_view name);  // throws on unknown identifier
std::string_view env_name(EnvId env);
int env_dimension(EnvId env);

/// Real-valued environment state, e.g. [theta, theta_dot] for the pendulum
/// or [x, x_dot] for the mountain car.
struct ContinuousEnvState {
    EnvId env;
    std::vector<double> values;
};

struct EnvStepResult {
    ContinuousEnvState next;
    double reward;
};

/// Advances the environment one step. Dynamics are deterministic for both
/// built-in environments; the rng parameter is reserved for stochastic
/// variants. Actions outside the environment bounds are clipped.
///
/// Pendulum: theta_dot' = theta_dot + (3g/(2l) sin(theta) + 3u/(m l^2)) dt
/// with dt = 0.05, g = 10, m = l = 1, torque clipped to [-2, 2], speed to
/// [-8, 8], theta wrapped to [-pi, pi); reward -(theta'^2 + 0.1 theta_dot'^2
/// + 0.001 u^2) with theta = 0 upright.
///
/// Mountain car: x_dot' = x_dot + 0.0015 u - 0.0025 cos(3x), x in
/// [-1.2, 0.6], x_dot in [-0.07, 0.07], u in [-1, 1]; shaped reward r = x.
/// States at or beyond the goal position (x >= 0.45) are absorbing.
EnvStepResult env_step(const ContinuousEnvState& state, double action, Rng& rng);

/// Draws from the environment's initial-state distribution (pendulum:
/// theta ~ U[-pi, pi), theta_dot ~ U[-1, 1]; mountain car: x ~ U[-0.6, -0.4],
/// x_dot = 0).
ContinuousEnvState env_initial_state(EnvId env, Rng& rng);

/// State-dependent part of the reward, evaluated at a raw state vector.
double env_state_reward(EnvId env, std::span<const double> values);

/// Evenly spaced representative actions spanning the action bounds.
std::vector<double> env_action_grid(EnvId env, int n_actions);

/// Uniform-bin discretization of a box in state space plus a finite action
/// grid. Flattened state indices are row-major over the per-dimension bins.
struct DiscretizationSpec {
    struct Dim {
        double lo;
        double hi;
        int bins;
    };
    std::vector<Dim> dims;
    std::vector<double> actions;

    int n_states() const {
        int n = 1;
        for (const auto& d : dims) n *= d.bins;
        return n;
    }
    int n_actions() const { return static_cast<int>(actions.size()); }
};

/// Spec over the environment's natural state bounds with the given bin
/// counts (one per dimension) and action-grid size.
DiscretizationSpec default_discretization(EnvId env, std::span<const int> bins, int n_actions);

/// Maps a state vector to its flattened bin index. Out-of-range values clamp
/// to the edge bins. Throws on dimension mismatch.
int discretize(std::span<const double> values, const DiscretizationSpec& spec);
int discretize(const ContinuousEnvState& state, const DiscretizationSpec& spec);

/// Midpoint of the cell addressed by a flattened index; the inverse of
/// discretize on in-range indices.
std::vector<double> bin_center(int index, const DiscretizationSpec& spec);

/// Tabular MDP induced by stepping the environment from every cell midpoint
/// with every grid action. Deterministic dynamics give one-hot rows; the
/// reward vector holds the state-dependent reward at each midpoint.
TabularMdp discretized_mdp(EnvId env, const DiscretizationSpec& spec);

/// Bin-mass image of the environment's initial-state distribution (per-cell
/// overlap fractions, product across dimensions).
std::vector<double> discretized_initial_dist(EnvId env, const DiscretizationSpec& spec);

/// Deterministic N x N gridworld: four move actions, walls absorb motion,
/// a single absorbing goal in the bottom-right corner with reward 1 and
/// reward 0 elsewhere.
struct GridworldMdp {
    TabularMdp mdp;
    int size = 0;
    int goal_state = 0;
    std::vector<double> initial_dist;  // uniform over non-goal states
};

GridworldMdp gridworld_mdp(int size);

/// Minimal episodic stepping interface shared by tabular and discretized
/// continuous environments; used by dataset collection and control.
class Simulator {
public:
    virtual ~Simulator() = default;
    virtual int n_states() const = 0;
    virtual int n_actions() const = 0;
    virtual int reset(Rng& rng) = 0;
    /// Steps from the current internal state; returns (next state, reward).
    virtual std::pair<int, double> step(int action, Rng& rng) = 0;
};

/// Samples transitions from a TabularMdp; the emitted reward is the reward
/// of the state being entered. Holds references only.
class MdpSimulator final : public Simulator {
public:
    /// initial_dist may be empty for uniform resets.
    MdpSimulator(const TabularMdp& mdp, std::span<const double> initial_dist);

    int n_states() const override { return mdp_.n_states; }
    int n_actions() const override { return mdp_.n_actions; }
    int reset(Rng& rng) override;
    std::pair<int, double> step(int action, Rng& rng) override;

private:
    const TabularMdp& mdp_;
    std::vector<double> initial_;
    int state_ = 0;
};

/// Steps the true continuous dynamics while exposing discretized state
/// indices and grid actions.
class DiscretizedSimulator final : public Simulator {
public:
    DiscretizedSimulator(EnvId env, DiscretizationSpec spec);

    int n_states() const override { return spec_.n_states(); }
    int n_actions() const override { return spec_.n_actions(); }
    int reset(Rng& rng) override;
    std::pair<int, double> step(int action, Rng& rng) override;

private:
    EnvId env_;
    DiscretizationSpec spec_;
    ContinuousEnvState state_;
};

}  // namespace gm
