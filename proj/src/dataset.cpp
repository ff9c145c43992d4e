#include "gammamodel/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gm {

TransitionDataset collect_dataset(Simulator& sim, const PolicyTable& policy, long n_steps,
                                  Rng& rng, long episode_length) {
    if (n_steps < 1) throw std::invalid_argument("collect_dataset: n_steps must be >= 1");
    if (episode_length < 1)
        throw std::invalid_argument("collect_dataset: episode_length must be >= 1");
    if (policy.n_states != sim.n_states() || policy.n_actions != sim.n_actions())
        throw std::invalid_argument("collect_dataset: policy dimensions mismatch");
    TransitionDataset dataset;
    int state = sim.reset(rng);
    long in_episode = 0;
    for (long i = 0; i < n_steps; ++i) {
        if (in_episode == episode_length) {
            state = sim.reset(rng);
            in_episode = 0;
        }
        const int action = rng.categorical(policy.row(state));
        const auto [next, reward] = sim.step(action, rng);
        dataset.push({state, action, reward, next});
        state = next;
        ++in_episode;
    }
    return dataset;
}

TransitionDataset collect_dataset(const TabularMdp& mdp, const PolicyTable& policy, long n_steps,
                                  Rng& rng, long episode_length,
                                  std::span<const double> initial_dist) {
    MdpSimulator sim(mdp, initial_dist);
    return collect_dataset(sim, policy, n_steps, rng, episode_length);
}

TransitionDataset enumerate_dataset(const TabularMdp& mdp, int copies_per_pair, Rng& rng) {
    if (copies_per_pair < 1)
        throw std::invalid_argument("enumerate_dataset: copies_per_pair must be >= 1");
    TransitionDataset dataset;
    for (int c = 0; c < copies_per_pair; ++c) {
        for (int s = 0; s < mdp.n_states; ++s) {
            for (int a = 0; a < mdp.n_actions; ++a) {
                const int next = rng.categorical(mdp.transition_row(s, a));
                dataset.push({s, a, mdp.reward[next], next});
            }
        }
    }
    return dataset;
}

void write_dataset_csv(const TransitionDataset& dataset, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fputs("s,a,r,s_next\n", f);
    for (const auto& sample : dataset)
        std::fprintf(f, "%d,%d,%.17g,%d\n", sample.s, sample.a, sample.r, sample.s_next);
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

TransitionDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("s,a,r,s_next", 0) != 0)
        throw std::runtime_error("bad dataset header in " + path);
    TransitionDataset dataset;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        TransitionSample sample;
        std::istringstream fields(line);
        if (!(fields >> sample.s >> sample.a >> sample.r >> sample.s_next))
            throw std::runtime_error("bad dataset row in " + path + ": " + line);
        dataset.push(sample);
    }
    return dataset;
}

}  // namespace gm
