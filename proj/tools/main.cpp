// Command-line front end. Talks to the library exclusively through the C
// API, the same surface other language bindings would use.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gammamodel/capi.h"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    long seed = -1;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& options) {
    cmd->add_option("--config", options.config_path, "key=value configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", options.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", options.seed, "rng seed (overrides the config file)");
    cmd->add_option("--set", options.sets, "extra key=value override (repeatable)");
}

int dispatch(const std::string& command, const CommonOptions& options) {
    std::vector<std::string> overrides = options.sets;
    if (options.seed >= 0) overrides.push_back("seed=" + std::to_string(options.seed));
    std::vector<const char*> raw;
    raw.reserve(overrides.size());
    for (const auto& entry : overrides) raw.push_back(entry.c_str());

    const gm_status status =
        gm_run_command(command.c_str(), options.config_path.empty() ? nullptr : options.config_path.c_str(),
                       raw.empty() ? nullptr : raw.data(), static_cast<int>(raw.size()),
                       options.out_dir.c_str());
    if (status != GM_OK) std::fprintf(stderr, "error: %s\n", gm_last_error());
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Infinite-horizon generative temporal-difference prediction toolkit"};
    app.require_subcommand(1);

    CommonOptions oracle_opts;
    auto* oracle = app.add_subcommand(
        "oracle", "Exact occupancy/successor tables and value functions for a configured MDP");
    add_common(oracle, oracle_opts);

    CommonOptions train_opts;
    auto* train = app.add_subcommand(
        "train", "Train a gamma-model (sampled or expected mode) and write it with a training log");
    add_common(train, train_opts);

    CommonOptions sweep_opts;
    auto* sweep = app.add_subcommand(
        "sweep-horizon", "Steps needed to cover a target mass across a discount grid");
    add_common(sweep, sweep_opts);

    CommonOptions map_opts;
    auto* map = app.add_subcommand(
        "value-map", "Model-based value map next to the exact oracle map on a discretized grid");
    add_common(map, map_opts);

    CommonOptions control_opts;
    auto* control = app.add_subcommand(
        "control", "Actor-critic learning curves per estimator and seed");
    add_common(control, control_opts);

    std::string manifest_path;
    std::string rerun_out = ".";
    auto* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
    rerun->add_option("manifest", manifest_path, "manifest.json of a previous run")
        ->required()
        ->check(CLI::ExistingFile);
    rerun->add_option("--out", rerun_out, "output directory (created if missing)");

    CLI11_PARSE(app, argc, argv);

    if (oracle->parsed()) return dispatch("oracle", oracle_opts);
    if (train->parsed()) return dispatch("train", train_opts);
    if (sweep->parsed()) return dispatch("sweep-horizon", sweep_opts);
    if (map->parsed()) return dispatch("value-map", map_opts);
    if (control->parsed()) return dispatch("control", control_opts);
    if (rerun->parsed()) {
        const gm_status status = gm_rerun_manifest(manifest_path.c_str(), rerun_out.c_str());
        if (status != GM_OK) std::fprintf(stderr, "error: %s\n", gm_last_error());
        return status;
    }
    return 0;
}
