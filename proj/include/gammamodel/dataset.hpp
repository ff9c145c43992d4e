#pragma once

#include <deque>
#include <optional>
#include <string>

#include "gammamodel/envs.hpp"
#include "gammamodel/mdp.hpp"
#include "gammamodel/rng.hpp"

namespace gm {

struct TransitionSample {
    int s = 0;
    int a = 0;
    double r = 0.0;
    int s_next = 0;
};

/// Ordered replay buffer of transitions with optional FIFO eviction once a
/// capacity is set. Single-writer; reads are safe to share.
class TransitionDataset {
public:
    TransitionDataset() = default;
    explicit TransitionDataset(std::size_t capacity) : capacity_(capacity) {}

    void push(const TransitionSample& sample) {
        samples_.push_back(sample);
        if (capacity_ && samples_.size() > *capacity_) samples_.pop_front();
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const TransitionSample& operator[](std::size_t i) const { return samples_[i]; }
    std::optional<std::size_t> capacity() const { return capacity_; }

    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::deque<TransitionSample> samples_;
    std::optional<std::size_t> capacity_;
};

/// Rolls the simulator for n_steps transitions, resetting from the
/// initial-state distribution every episode_length steps. Deterministic for
/// a given rng seed. Throws if n_steps < 1.
TransitionDataset collect_dataset(Simulator& sim, const PolicyTable& policy, long n_steps,
                                  Rng& rng, long episode_length);

/// Convenience overload over a TabularMdp (uniform resets when initial_dist
/// is empty).
TransitionDataset collect_dataset(const TabularMdp& mdp, const PolicyTable& policy, long n_steps,
                                  Rng& rng, long episode_length,
                                  std::span<const double> initial_dist = {});

/// Full-coverage dataset: copies_per_pair draws of s' ~ p(.|s,a) for every
/// (s, a). For deterministic MDPs a single copy reproduces the transition
/// table exactly.
TransitionDataset enumerate_dataset(const TabularMdp& mdp, int copies_per_pair, Rng& rng);

/// CSV persistence, header `s,a,r,s_next`.
void write_dataset_csv(const TransitionDataset& dataset, const std::string& path);
TransitionDataset read_dataset_csv(const std::string& path);

}  // namespace gm
