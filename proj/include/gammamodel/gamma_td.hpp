#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gammamodel/dataset.hpp"
#include "gammamodel/matrix.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/oracle.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

/// Categorical generative model of the discounted occupancy: one logit row
/// per (state, action), probabilities via row softmax, tagged with the
/// discount it is trained for. The softmax parameterization keeps every row
/// a valid distribution under arbitrary gradient updates.
class GammaModelTable {
public:
    GammaModelTable() = default;
    /// Uniform rows (zero logits).
    GammaModelTable(int n_states, int n_actions, double gamma);
    /// Logits from given probability rows (log p, floored at 1e-300 so exact
    /// zeros survive the round trip). Rows must sum to 1 within 1e-9.
    static GammaModelTable from_probabilities(int n_states, int n_actions, double gamma,
                                              std::span<const double> probs);
    static GammaModelTable from_occupancy(const OccupancyTable& occupancy);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    double gamma() const { return gamma_; }

    std::span<double> logits_row(int s, int a) {
        return {logits_.data() + (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_,
                static_cast<std::size_t>(n_states_)};
    }
    std::span<const double> logits_row(int s, int a) const {
        return {logits_.data() + (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_,
                static_cast<std::size_t>(n_states_)};
    }
    std::vector<double>& logits() { return logits_; }
    const std::vector<double>& logits() const { return logits_; }

    /// Softmax of one logit row into `out` (size n_states).
    void probabilities(int s, int a, std::span<double> out) const;
    std::vector<double> probabilities(int s, int a) const;
    /// Materializes all probability rows in [s][a][s_e] order.
    std::vector<double> probability_table() const;

private:
    int n_states_ = 0;
    int n_actions_ = 0;
    double gamma_ = 0.0;
    std::vector<double> logits_;
};

/// Delayed copy of a live model, maintained as an exponential moving average
/// of the live logits: target <- tau * live + (1 - tau) * target after every
/// training step.
///
/// The EMA is applied lazily per row. A row's live logits only change when
/// that row receives a gradient update, so catching a target row up over k
/// untouched steps has the exact closed form
///   target = (1-tau)^k target + (1 - (1-tau)^k) live,
/// which makes the delay O(batch) per step instead of O(table).
class TargetModel {
public:
    TargetModel(const GammaModelTable& live, double tau);

    double tau() const { return tau_; }

    /// Marks one completed training step (one EMA application).
    void advance_step() { ++step_; }

    /// Target logits of a row, synced through all completed steps.
    std::span<const double> logits_row(const GammaModelTable& live, int s, int a);
    /// Softmax of the synced target row.
    void probabilities(const GammaModelTable& live, int s, int a, std::span<double> out);

    /// Must be called immediately before the caller overwrites a live row,
    /// so the pending EMA applications still see the old live values.
    void before_live_row_write(const GammaModelTable& live, int s, int a);

    /// Fully synced snapshot (e.g. for inspection at the end of training).
    const GammaModelTable& snapshot(const GammaModelTable& live);

private:
    void sync_row(const GammaModelTable& live, int row);

    GammaModelTable model_;
    std::vector<long long> last_sync_;
    long long step_ = 0;
    double tau_ = 0.0;
};

/// Knobs for sampled-mode training (the categorical analogue of the
/// delayed-target bootstrapped objective).
struct TrainConfig {
    enum class Mode { expected, sampled };
    Mode mode = Mode::sampled;
    double step_size = 1e-2;   // cross-entropy step on the live logits
    double tau = 5e-3;         // target delay parameter
    int batch_size = 128;
    long steps = 50000;
    int samples_per_pair = 1;  // exit-state draws per sampled transition
    std::uint64_t seed = 0;
    long log_every = 1000;
};

void validate_train_config(const TrainConfig& config);

/// Bootstrapped target distribution for one transition:
/// (1-gamma) delta_{s_next} + gamma * sum_a pi(a|s_next) target(.|s_next, a).
std::vector<double> bootstrapped_target(const TransitionSample& sample,
                                        const GammaModelTable& target, const PolicyTable& policy);

/// Policy-mixed rows U[s] = sum_a pi(a|s) mu(.|s,a) as an S x S matrix.
Matrix state_conditioned(const GammaModelTable& model, const PolicyTable& policy);

/// One full-expectation bootstrap sweep: every row is rewritten to
/// (1-gamma) p(.|s,a) + gamma sum_{s'} p(s'|s,a) U[s'] by exact probability
/// assignment. A gamma-contraction in sup-L1.
GammaModelTable expected_td_sweep(const GammaModelTable& model, const TabularMdp& mdp,
                                  const PolicyTable& policy);

/// Iterates the expected sweep from uniform initialization, staying in
/// probability space between sweeps. Stops after `sweeps` sweeps, or earlier
/// once the sup-L1 change drops below `tol` (if tol > 0). sweep_changes,
/// when given, receives the per-sweep sup-L1 change.
GammaModelTable expected_td_fixed_point(const TabularMdp& mdp, const PolicyTable& policy,
                                        double gamma, int sweeps, double tol = 0.0,
                                        int* sweeps_used = nullptr,
                                        std::vector<double>* sweep_changes = nullptr);

/// Diagnostic squared log-density error against the bootstrapped target
/// mixture, in expectation over exit states drawn from that mixture.
/// Probabilities are floored at 1e-12 before the log. Zero iff the model row
/// matches the target mixture on its support. Monitoring only; the update
/// path is cross-entropy.
double density_regression_loss(const GammaModelTable& model, const GammaModelTable& target,
                               const TransitionSample& sample, const PolicyTable& policy);

/// Incremental sampled-mode trainer: per step, draws a batch of transitions,
/// samples exit states from the delayed bootstrapped target, and takes an
/// averaged cross-entropy step on the live logits toward the sampled exits,
/// then advances the target EMA.
class TdTrainer {
public:
    TdTrainer(int n_states, int n_actions, double gamma, const TrainConfig& config);

    /// One batch step; returns the mean batch cross-entropy (measured before
    /// the update).
    double step(const TransitionDataset& dataset, const PolicyTable& policy, Rng& rng);

    const GammaModelTable& model() const { return live_; }
    const GammaModelTable& target_snapshot() { return target_.snapshot(live_); }
    long steps_done() const { return steps_done_; }

private:
    GammaModelTable live_;
    TargetModel target_;
    double step_size_;
    int batch_size_;
    int samples_per_pair_;
    long steps_done_ = 0;

    // per-step scratch, keyed by touched live row
    struct RowGrad {
        int row;
        double weight;              // batch elements landing on this row
        std::vector<double> exits;  // accumulated exit-state frequencies
    };
    std::vector<RowGrad> grads_;
    std::vector<int> row_slot_;
    std::vector<double> target_probs_;
    std::vector<double> live_probs_;
};

struct TrainLogEntry {
    long step = 0;
    double loss = 0.0;
    double tv_to_oracle = -1.0;  // < 0 when no oracle was supplied
};

struct TrainReport {
    std::vector<TrainLogEntry> entries;
    long unobserved_pairs = 0;  // (s,a) pairs absent from the dataset
};

/// Full sampled-mode training run. Rows for unobserved (s, a) pairs stay
/// uniform and are counted in the report. When oracle_probs (flat
/// [s][a][s_e] rows) is supplied, log entries include the max per-row total
/// variation to it. Deterministic for a given rng.
GammaModelTable sampled_td_train(const TransitionDataset& dataset, const PolicyTable& policy,
                                 double gamma, const TrainConfig& config, Rng& rng,
                                 TrainReport* report = nullptr,
                                 const std::vector<double>* oracle_probs = nullptr);

/// Max over (s, a) of the total variation between model rows and flat
/// reference rows.
double max_row_tv(const GammaModelTable& model, std::span<const double> reference);

}  // namespace gm
