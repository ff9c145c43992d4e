#include "gammamodel/gamma_td.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gm {

namespace {

constexpr double kLogFloor = 1e-12;   // diagnostic-loss probability floor
constexpr double kProbFloor = 1e-300; // keeps log finite when building logits

void softmax_row(std::span<const double> logits, std::span<double> out) {
    double mx = logits[0];
    for (double l : logits) mx = std::max(mx, l);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] *= inv;
}

void check_sample_bounds(const TransitionSample& sample, int n_states, int n_actions) {
    if (sample.s < 0 || sample.s >= n_states || sample.s_next < 0 ||
        sample.s_next >= n_states || sample.a < 0 || sample.a >= n_actions)
        throw std::invalid_argument("transition sample index out of bounds");
}

void check_policy_model(const GammaModelTable& model, const PolicyTable& policy) {
    if (policy.n_states != model.n_states() || policy.n_actions != model.n_actions())
        throw std::invalid_argument("policy and model dimensions mismatch");
}

// one full-expectation bootstrap sweep in probability space
void sweep_probs(const TabularMdp& mdp, const PolicyTable& policy, double gamma,
                 const std::vector<double>& in, std::vector<double>& out) {
    const int n = mdp.n_states;
    const int n_actions = mdp.n_actions;
    // U[s'] = sum_a pi(a|s') mu(.|s',a)
    Matrix mixed(n, n, 0.0);
    for (int s = 0; s < n; ++s) {
        auto u = mixed.row(s);
        for (int a = 0; a < n_actions; ++a) {
            const double w = policy.row(s)[a];
            if (w == 0.0) continue;
            const double* row = in.data() + (static_cast<std::size_t>(s) * n_actions + a) * n;
            for (int j = 0; j < n; ++j) u[j] += w * row[j];
        }
    }
    out.assign(in.size(), 0.0);
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            const auto p = mdp.transition_row(s, a);
            double* dst = out.data() + (static_cast<std::size_t>(s) * n_actions + a) * n;
            for (int next = 0; next < n; ++next) {
                const double w = p[next];
                if (w == 0.0) continue;
                dst[next] += (1.0 - gamma) * w;
                const auto u = mixed.row(next);
                const double gw = gamma * w;
                for (int j = 0; j < n; ++j) dst[j] += gw * u[j];
            }
        }
    }
}

}  // namespace

GammaModelTable::GammaModelTable(int n_states, int n_actions, double gamma)
    : n_states_(n_states), n_actions_(n_actions), gamma_(gamma) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("GammaModelTable: counts must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("GammaModelTable: gamma must lie in [0, 1)");
    logits_.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
}

GammaModelTable GammaModelTable::from_probabilities(int n_states, int n_actions, double gamma,
                                                    std::span<const double> probs) {
    GammaModelTable model(n_states, n_actions, gamma);
    if (probs.size() != model.logits_.size())
        throw std::invalid_argument("from_probabilities: size mismatch");
    const std::size_t row_len = static_cast<std::size_t>(n_states);
    for (std::size_t r = 0; r < probs.size(); r += row_len) {
        double sum = 0.0;
        for (std::size_t j = 0; j < row_len; ++j) {
            const double p = probs[r + j];
            if (!(p >= 0.0)) throw std::invalid_argument("from_probabilities: negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("from_probabilities: row does not sum to 1");
        for (std::size_t j = 0; j < row_len; ++j)
            model.logits_[r + j] = std::log(std::max(probs[r + j], kProbFloor));
    }
    return model;
}

GammaModelTable GammaModelTable::from_occupancy(const OccupancyTable& occupancy) {
    return from_probabilities(occupancy.n_states, occupancy.n_actions, occupancy.gamma,
                              occupancy.mu);
}

void GammaModelTable::probabilities(int s, int a, std::span<double> out) const {
    softmax_row(logits_row(s, a), out);
}

std::vector<double> GammaModelTable::probabilities(int s, int a) const {
    std::vector<double> out(n_states_);
    probabilities(s, a, out);
    return out;
}

std::vector<double> GammaModelTable::probability_table() const {
    std::vector<double> out(logits_.size());
    const std::size_t row_len = static_cast<std::size_t>(n_states_);
    for (std::size_t r = 0; r < out.size(); r += row_len)
        softmax_row({logits_.data() + r, row_len}, {out.data() + r, row_len});
    return out;
}

TargetModel::TargetModel(const GammaModelTable& live, double tau) : model_(live), tau_(tau) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("TargetModel: tau must lie in (0, 1]");
    last_sync_.assign(static_cast<std::size_t>(live.n_states()) * live.n_actions(), 0);
}

void TargetModel::sync_row(const GammaModelTable& live, int row) {
    const long long behind = step_ - last_sync_[row];
    if (behind == 0) return;
    last_sync_[row] = step_;
    // live row unchanged since last sync, so `behind` EMA applications
    // collapse to one blend
    const double keep = std::pow(1.0 - tau_, static_cast<double>(behind));
    const double mix = 1.0 - keep;
    const int n = live.n_states();
    const int s = row / live.n_actions();
    const int a = row % live.n_actions();
    auto target = model_.logits_row(s, a);
    const auto source = live.logits_row(s, a);
    for (int j = 0; j < n; ++j) target[j] = keep * target[j] + mix * source[j];
}

std::span<const double> TargetModel::logits_row(const GammaModelTable& live, int s, int a) {
    sync_row(live, s * live.n_actions() + a);
    return model_.logits_row(s, a);
}

void TargetModel::probabilities(const GammaModelTable& live, int s, int a,
                                std::span<double> out) {
    softmax_row(logits_row(live, s, a), out);
}

void TargetModel::before_live_row_write(const GammaModelTable& live, int s, int a) {
    sync_row(live, s * live.n_actions() + a);
}

const GammaModelTable& TargetModel::snapshot(const GammaModelTable& live) {
    const int rows = live.n_states() * live.n_actions();
    for (int r = 0; r < rows; ++r) sync_row(live, r);
    return model_;
}

void validate_train_config(const TrainConfig& config) {
    if (!(config.step_size > 0.0)) throw std::invalid_argument("train config: step size must be > 0");
    if (!(config.tau > 0.0 && config.tau <= 1.0))
        throw std::invalid_argument("train config: tau must lie in (0, 1]");
    if (config.batch_size < 1) throw std::invalid_argument("train config: batch size must be >= 1");
    if (config.steps < 1) throw std::invalid_argument("train config: step budget must be >= 1");
    if (config.samples_per_pair < 1)
        throw std::invalid_argument("train config: samples_per_pair must be >= 1");
    if (config.log_every < 1) throw std::invalid_argument("train config: log_every must be >= 1");
}

std::vector<double> bootstrapped_target(const TransitionSample& sample,
                                        const GammaModelTable& target,
                                        const PolicyTable& policy) {
    check_policy_model(target, policy);
    check_sample_bounds(sample, target.n_states(), target.n_actions());
    const int n = target.n_states();
    const double gamma = target.gamma();
    std::vector<double> out(n, 0.0);
    std::vector<double> row(n);
    for (int a = 0; a < target.n_actions(); ++a) {
        const double w = policy.row(sample.s_next)[a];
        if (w == 0.0) continue;
        target.probabilities(sample.s_next, a, row);
        const double gw = gamma * w;
        for (int j = 0; j < n; ++j) out[j] += gw * row[j];
    }
    out[sample.s_next] += 1.0 - gamma;
    return out;
}

Matrix state_conditioned(const GammaModelTable& model, const PolicyTable& policy) {
    check_policy_model(model, policy);
    const int n = model.n_states();
    Matrix mixed(n, n, 0.0);
    std::vector<double> row(n);
    for (int s = 0; s < n; ++s) {
        auto u = mixed.row(s);
        for (int a = 0; a < model.n_actions(); ++a) {
            const double w = policy.row(s)[a];
            if (w == 0.0) continue;
            model.probabilities(s, a, row);
            for (int j = 0; j < n; ++j) u[j] += w * row[j];
        }
    }
    return mixed;
}

GammaModelTable expected_td_sweep(const GammaModelTable& model, const TabularMdp& mdp,
                                  const PolicyTable& policy) {
    check_policy_model(model, policy);
    if (mdp.n_states != model.n_states() || mdp.n_actions != model.n_actions())
        throw std::invalid_argument("expected_td_sweep: mdp dimensions mismatch");
    const std::vector<double> in = model.probability_table();
    std::vector<double> out;
    sweep_probs(mdp, policy, model.gamma(), in, out);
    return GammaModelTable::from_probabilities(model.n_states(), model.n_actions(),
                                               model.gamma(), out);
}

GammaModelTable expected_td_fixed_point(const TabularMdp& mdp, const PolicyTable& policy,
                                        double gamma, int sweeps, double tol, int* sweeps_used,
                                        std::vector<double>* sweep_changes) {
    if (sweeps < 1) throw std::invalid_argument("expected_td_fixed_point: sweeps must be >= 1");
    const int n = mdp.n_states;
    std::vector<double> probs(static_cast<std::size_t>(n) * mdp.n_actions * n, 1.0 / n);
    std::vector<double> next;
    int used = 0;
    const std::size_t row_len = static_cast<std::size_t>(n);
    const bool track_change = tol > 0.0 || sweep_changes != nullptr;
    for (int k = 0; k < sweeps; ++k) {
        sweep_probs(mdp, policy, gamma, probs, next);
        ++used;
        double change = 0.0;
        if (track_change) {
            for (std::size_t r = 0; r < probs.size(); r += row_len) {
                double l1 = 0.0;
                for (std::size_t j = 0; j < row_len; ++j)
                    l1 += std::abs(next[r + j] - probs[r + j]);
                change = std::max(change, l1);
            }
            if (sweep_changes) sweep_changes->push_back(change);
        }
        probs.swap(next);
        if (tol > 0.0 && change <= tol) break;
    }
    if (sweeps_used) *sweeps_used = used;
    return GammaModelTable::from_probabilities(n, mdp.n_actions, gamma, probs);
}

double density_regression_loss(const GammaModelTable& model, const GammaModelTable& target,
                               const TransitionSample& sample, const PolicyTable& policy) {
    if (model.n_states() != target.n_states() || model.n_actions() != target.n_actions())
        throw std::invalid_argument("density_regression_loss: model shapes disagree");
    const std::vector<double> mix = bootstrapped_target(sample, target, policy);
    const std::vector<double> probs = model.probabilities(sample.s, sample.a);
    double loss = 0.0;
    for (int j = 0; j < model.n_states(); ++j) {
        if (mix[j] == 0.0) continue;
        const double diff = std::log(std::max(probs[j], kLogFloor)) -
                            std::log(std::max(mix[j], kLogFloor));
        loss += mix[j] * diff * diff;
    }
    return loss;
}

TdTrainer::TdTrainer(int n_states, int n_actions, double gamma, const TrainConfig& config)
    : live_(n_states, n_actions, gamma),
      target_(live_, config.tau),
      step_size_(config.step_size),
      batch_size_(config.batch_size),
      samples_per_pair_(config.samples_per_pair) {
    validate_train_config(config);
    row_slot_.assign(static_cast<std::size_t>(n_states) * n_actions, -1);
    target_probs_.resize(n_states);
    live_probs_.resize(n_states);
}

double TdTrainer::step(const TransitionDataset& dataset, const PolicyTable& policy, Rng& rng) {
    if (dataset.empty()) throw std::invalid_argument("TdTrainer: empty dataset");
    check_policy_model(live_, policy);
    const int n = live_.n_states();
    const double gamma = live_.gamma();
    const double per_draw = 1.0 / samples_per_pair_;

    // phase 1: sample the batch and the bootstrapped exit states (targets
    // reflect the delay through all completed steps)
    std::size_t used_slots = 0;
    for (int b = 0; b < batch_size_; ++b) {
        const TransitionSample& sample =
            dataset[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(dataset.size())))];
        check_sample_bounds(sample, n, live_.n_actions());
        const int row = sample.s * live_.n_actions() + sample.a;
        int slot = row_slot_[row];
        if (slot < 0 || static_cast<std::size_t>(slot) >= used_slots ||
            grads_[slot].row != row) {
            slot = static_cast<int>(used_slots++);
            if (grads_.size() < used_slots) grads_.push_back({row, 0.0, {}});
            grads_[slot].row = row;
            grads_[slot].weight = 0.0;
            grads_[slot].exits.assign(n, 0.0);
            row_slot_[row] = slot;
        }
        grads_[slot].weight += 1.0;
        const int a_next = rng.categorical(policy.row(sample.s_next));
        bool have_target_row = false;
        for (int k = 0; k < samples_per_pair_; ++k) {
            int exit_state;
            if (rng.uniform() < 1.0 - gamma) {
                exit_state = sample.s_next;
            } else {
                if (!have_target_row) {
                    target_.probabilities(live_, sample.s_next, a_next, target_probs_);
                    have_target_row = true;
                }
                exit_state = rng.categorical(target_probs_);
            }
            grads_[slot].exits[exit_state] += per_draw;
        }
    }

    // phase 2: averaged cross-entropy step per touched row, then one EMA
    // application
    double loss = 0.0;
    const double scale = step_size_ / batch_size_;
    for (std::size_t i = 0; i < used_slots; ++i) {
        const RowGrad& grad = grads_[i];
        const int s = grad.row / live_.n_actions();
        const int a = grad.row % live_.n_actions();
        live_.probabilities(s, a, live_probs_);
        for (int j = 0; j < n; ++j) {
            if (grad.exits[j] == 0.0) continue;
            loss -= grad.exits[j] * std::log(std::max(live_probs_[j], kProbFloor));
        }
        target_.before_live_row_write(live_, s, a);
        auto logits = live_.logits_row(s, a);
        for (int j = 0; j < n; ++j)
            logits[j] += scale * (grad.exits[j] - grad.weight * live_probs_[j]);
    }
    target_.advance_step();
    ++steps_done_;
    return loss / batch_size_;
}

GammaModelTable sampled_td_train(const TransitionDataset& dataset, const PolicyTable& policy,
                                 double gamma, const TrainConfig& config, Rng& rng,
                                 TrainReport* report, const std::vector<double>* oracle_probs) {
    validate_train_config(config);
    if (dataset.empty()) throw std::invalid_argument("sampled_td_train: empty dataset");
    const int n_states = policy.n_states;
    const int n_actions = policy.n_actions;

    std::vector<bool> observed(static_cast<std::size_t>(n_states) * n_actions, false);
    for (const auto& sample : dataset) {
        check_sample_bounds(sample, n_states, n_actions);
        observed[static_cast<std::size_t>(sample.s) * n_actions + sample.a] = true;
    }

    TdTrainer trainer(n_states, n_actions, gamma, config);
    double window_loss = 0.0;
    long window = 0;
    for (long step = 1; step <= config.steps; ++step) {
        window_loss += trainer.step(dataset, policy, rng);
        ++window;
        if (report && (step % config.log_every == 0 || step == config.steps)) {
            TrainLogEntry entry;
            entry.step = step;
            entry.loss = window_loss / window;
            if (oracle_probs) entry.tv_to_oracle = max_row_tv(trainer.model(), *oracle_probs);
            report->entries.push_back(entry);
            window_loss = 0.0;
            window = 0;
        }
    }
    if (report) {
        report->unobserved_pairs = 0;
        for (bool seen : observed)
            if (!seen) ++report->unobserved_pairs;
    }
    return trainer.model();
}

double max_row_tv(const GammaModelTable& model, std::span<const double> reference) {
    const std::size_t expected = static_cast<std::size_t>(model.n_states()) *
                                 model.n_actions() * model.n_states();
    if (reference.size() != expected)
        throw std::invalid_argument("max_row_tv: reference size mismatch");
    const int n = model.n_states();
    std::vector<double> probs(n);
    double worst = 0.0;
    for (int s = 0; s < model.n_states(); ++s)
        for (int a = 0; a < model.n_actions(); ++a) {
            model.probabilities(s, a, probs);
            const double* ref =
                reference.data() + (static_cast<std::size_t>(s) * model.n_actions() + a) * n;
            double l1 = 0.0;
            for (int j = 0; j < n; ++j) l1 += std::abs(probs[j] - ref[j]);
            worst = std::max(worst, 0.5 * l1);
        }
    return worst;
}

}  // namespace gm
