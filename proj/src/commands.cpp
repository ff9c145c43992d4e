#include "gammamodel/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "gammamodel/control.hpp"
#include "gammamodel/dataset.hpp"
#include "gammamodel/envs.hpp"
#include "gammamodel/gamma_td.hpp"
#include "gammamodel/oracle.hpp"
#include "gammamodel/rollout.hpp"
#include "gammamodel/value_expansion.hpp"

namespace fs = std::filesystem;

namespace gm {

namespace {

struct Problem {
    std::string env;
    TabularMdp mdp;
    std::vector<double> initial_dist;          // empty means uniform
    std::optional<DiscretizationSpec> spec;    // continuous environments only
    std::optional<EnvId> env_id;
};

Problem build_problem(const Config& config) {
    Problem problem;
    problem.env = config_get(config, "env", "gridworld");
    if (problem.env == "gridworld") {
        GridworldMdp grid = gridworld_mdp(config_get_int(config, "grid_size", 5));
        problem.mdp = std::move(grid.mdp);
        problem.initial_dist = std::move(grid.initial_dist);
    } else if (problem.env == "swap_chain") {
        problem.mdp = swap_chain_mdp();
    } else if (problem.env == "random") {
        Rng rng(static_cast<std::uint64_t>(config_get_long(config, "mdp_seed", 0)));
        problem.mdp = random_mdp(config_get_int(config, "n_states", 10),
                                 config_get_int(config, "n_actions", 3), rng);
    } else if (problem.env == "pendulum" || problem.env == "mountain_car") {
        const EnvId env = env_from_name(problem.env);
        const int n_actions = config_get_int(config, "n_actions", 5);
        int bins[2];
        if (env == EnvId::pendulum) {
            bins[0] = config_get_int(config, "bins_theta", 41);
            bins[1] = config_get_int(config, "bins_thetadot", 41);
        } else {
            bins[0] = config_get_int(config, "bins_x", 41);
            bins[1] = config_get_int(config, "bins_xdot", 41);
        }
        const DiscretizationSpec spec = default_discretization(env, bins, n_actions);
        problem.mdp = discretized_mdp(env, spec);
        problem.initial_dist = discretized_initial_dist(env, spec);
        problem.spec = spec;
        problem.env_id = env;
    } else {
        throw ValidationError("unknown env: " + problem.env);
    }
    const auto violations = validate_mdp(problem.mdp);
    if (!violations.empty()) {
        std::string joined = "invalid MDP:";
        for (const auto& v : violations) joined += "\n  " + v;
        throw ValidationError(joined);
    }
    return problem;
}

PolicyTable build_policy(const Config& config, const TabularMdp& mdp, double gamma) {
    const std::string name = config_get(config, "policy", "uniform");
    if (name == "uniform") return PolicyTable::uniform(mdp.n_states, mdp.n_actions);
    if (name == "vi_greedy") {
        const double vi_gamma = config_get_double(config, "vi_gamma", gamma);
        const double tolerance = config_get_double(config, "vi_tolerance", 1e-10);
        const auto vi = value_iteration(mdp, vi_gamma, tolerance);
        const double epsilon = config_get_double(config, "policy_epsilon", 0.0);
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw ValidationError("policy_epsilon must lie in [0, 1]");
        PolicyTable policy = vi.greedy_policy;
        if (epsilon > 0.0) {
            const double base = epsilon / mdp.n_actions;
            for (int s = 0; s < mdp.n_states; ++s) {
                auto row = policy.row(s);
                for (int a = 0; a < mdp.n_actions; ++a)
                    row[a] = (1.0 - epsilon) * row[a] + base;
            }
        }
        return policy;
    }
    throw ValidationError("unknown policy: " + name);
}

double require_gamma(const Config& config, double fallback) {
    const double gamma = config_get_double(config, "gamma", fallback);
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ValidationError("gamma must lie in [0, 1)");
    return gamma;
}

std::string join_out(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

// ----------------------------------------------------------------- oracle

std::vector<std::string> cmd_oracle(const Config& config, const std::string& out_dir) {
    const double gamma = require_gamma(config, 0.9);
    Problem problem = build_problem(config);
    const PolicyTable policy = build_policy(config, problem.mdp, gamma);

    const OccupancyTable occupancy = exact_occupancy(problem.mdp, policy, gamma);
    const SuccessorTable successor = exact_successor(problem.mdp, policy, gamma);
    const PolicyEvaluation values = policy_evaluation(problem.mdp, policy, gamma);

    std::printf("proposition1_residual=%.17g\n", proposition1_residual(occupancy, successor));

    save_model_file(to_model_file(occupancy), join_out(out_dir, "occupancy.model"));
    save_model_file(to_model_file(successor), join_out(out_dir, "successor.model"));

    std::vector<std::string> value_rows;
    for (int s = 0; s < problem.mdp.n_states; ++s)
        value_rows.push_back(std::to_string(s) + "," + format_double(values.v[s]));
    write_csv(join_out(out_dir, "values.csv"), "state,value", value_rows);

    std::vector<std::string> q_rows;
    for (int s = 0; s < problem.mdp.n_states; ++s)
        for (int a = 0; a < problem.mdp.n_actions; ++a)
            q_rows.push_back(std::to_string(s) + "," + std::to_string(a) + "," +
                             format_double(values.q(s, a)));
    write_csv(join_out(out_dir, "q_values.csv"), "state,action,value", q_rows);

    return {"occupancy.model", "successor.model", "values.csv", "q_values.csv"};
}

// ------------------------------------------------------------------ train

std::vector<std::string> cmd_train(const Config& config, const std::string& out_dir) {
    const double gamma = require_gamma(config, 0.9);
    Problem problem = build_problem(config);
    const PolicyTable policy = build_policy(config, problem.mdp, gamma);
    const std::string mode = config_get(config, "mode", "sampled");

    GammaModelTable model(problem.mdp.n_states, problem.mdp.n_actions, gamma);
    std::vector<std::string> log_rows;
    std::string log_header = "step,loss";

    if (mode == "expected") {
        const int sweeps = config_get_int(config, "sweeps", 200);
        const double tol = config_get_double(config, "sweep_tol", 0.0);
        std::vector<double> changes;
        model = expected_td_fixed_point(problem.mdp, policy, gamma, sweeps, tol, nullptr,
                                        &changes);
        for (std::size_t k = 0; k < changes.size(); ++k)
            log_rows.push_back(std::to_string(k + 1) + "," + format_double(changes[k]));
    } else if (mode == "sampled") {
        TransitionDataset dataset;
        const std::string dataset_path = config_get(config, "dataset", "");
        Rng rng(config_get_seed(config));
        if (!dataset_path.empty()) {
            try {
                dataset = read_dataset_csv(dataset_path);
            } catch (const std::exception& e) {
                throw IoError(e.what());
            }
        } else if (config.count("enumerate_copies")) {
            dataset = enumerate_dataset(problem.mdp, config_get_int(config, "enumerate_copies", 1),
                                        rng);
        } else {
            dataset = collect_dataset(problem.mdp, policy,
                                      config_get_long(config, "collect_steps", 10000), rng,
                                      config_get_long(config, "episode_length", 100),
                                      problem.initial_dist);
        }
        if (dataset.empty()) throw ValidationError("training dataset is empty");

        TrainConfig train_config;
        train_config.step_size = config_get_double(config, "step_size", 1e-2);
        train_config.tau = config_get_double(config, "tau", 5e-3);
        train_config.batch_size = config_get_int(config, "batch_size", 128);
        train_config.steps = config_get_long(config, "steps", 50000);
        train_config.samples_per_pair = config_get_int(config, "samples_per_pair", 1);
        train_config.log_every = config_get_long(config, "log_every", 1000);
        train_config.seed = config_get_seed(config);

        std::optional<std::vector<double>> oracle_rows;
        if (config_get_int(config, "log_tv", 0) != 0) {
            oracle_rows = exact_occupancy(problem.mdp, policy, gamma).mu;
            log_header = "step,loss,tv_to_oracle";
        }

        TrainReport report;
        model = sampled_td_train(dataset, policy, gamma, train_config, rng, &report,
                                 oracle_rows ? &*oracle_rows : nullptr);
        if (report.unobserved_pairs > 0)
            std::printf("unobserved_pairs=%ld\n", report.unobserved_pairs);
        for (const auto& entry : report.entries) {
            std::string row = std::to_string(entry.step) + "," + format_double(entry.loss);
            if (oracle_rows) row += "," + format_double(entry.tv_to_oracle);
            log_rows.push_back(row);
        }
    } else {
        throw ValidationError("unknown train mode: " + mode);
    }

    // final invariant check: every model row must be a distribution
    const std::vector<double> probs = model.probability_table();
    for (std::size_t r = 0; r < probs.size(); r += model.n_states()) {
        double sum = 0.0;
        for (int j = 0; j < model.n_states(); ++j) sum += probs[r + j];
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("trained model row failed the distribution invariant");
    }

    save_model_file(to_model_file(model), join_out(out_dir, "model.model"));
    write_csv(join_out(out_dir, "train_log.csv"), log_header, log_rows);
    return {"model.model", "train_log.csv"};
}

// --------------------------------------------------------- sweep-horizon

std::vector<std::string> cmd_sweep_horizon(const Config& config, const std::string& out_dir) {
    const std::vector<double> gammas = config_get_double_list(
        config, "gammas", "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9");
    const std::vector<double> tildes =
        config_get_double_list(config, "gamma_tildes", "0.9,0.95,0.99");
    const double coverage = config_get_double(config, "coverage", 0.95);

    std::vector<std::string> rows;
    for (const double gamma : gammas) {
        // diagonal row first: a matched discount needs a single step
        rows.push_back(format_double(gamma) + "," + format_double(gamma) + "," +
                       std::to_string(steps_to_mass(gamma, gamma, coverage)));
        for (const double tilde : tildes) {
            if (tilde <= gamma) continue;
            rows.push_back(format_double(gamma) + "," + format_double(tilde) + "," +
                           std::to_string(steps_to_mass(gamma, tilde, coverage)));
        }
    }
    write_csv(join_out(out_dir, "sweep.csv"), "gamma,gamma_tilde,steps_to_95", rows);
    return {"sweep.csv"};
}

// -------------------------------------------------------------- value-map

std::vector<std::string> cmd_value_map(const Config& config, const std::string& out_dir) {
    Problem problem = build_problem(config);
    if (!problem.spec)
        throw ValidationError("value-map requires a discretized environment");
    const std::string model_path = config_get(config, "model", "");
    if (model_path.empty()) throw ValidationError("value-map requires model=<path>");

    ModelFile file;
    try {
        file = load_model_file(model_path);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    if (file.n_states != problem.mdp.n_states || file.n_actions != problem.mdp.n_actions)
        throw ValidationError("model file and discretization disagree on shape");
    const GammaModelTable model = to_gamma_model(file);
    const double gamma = model.gamma();

    const PolicyTable policy = build_policy(config, problem.mdp, gamma);
    const PolicyEvaluation oracle = policy_evaluation(problem.mdp, policy, gamma);

    // model map: V(s) = E_{a~pi} (1/(1-gamma)) E_{s_e ~ mu(.|s,a)}[r(s_e)]
    std::vector<double> model_map(problem.mdp.n_states, 0.0);
    for (int s = 0; s < problem.mdp.n_states; ++s) {
        double value = 0.0;
        for (int a = 0; a < problem.mdp.n_actions; ++a) {
            const double w = policy.row(s)[a];
            if (w == 0.0) continue;
            value += w * q_from_model(model, problem.mdp.reward, s, a);
        }
        model_map[s] = value;
    }

    double max_dev = 0.0;
    double mean_dev = 0.0;
    for (int s = 0; s < problem.mdp.n_states; ++s) {
        const double dev = std::abs(model_map[s] - oracle.v[s]);
        max_dev = std::max(max_dev, dev);
        mean_dev += dev;
    }
    mean_dev /= problem.mdp.n_states;
    std::printf("max_abs_dev=%.17g\nmean_abs_dev=%.17g\n", max_dev, mean_dev);

    const auto emit = [&](const std::vector<double>& values, const std::string& name) {
        std::vector<std::string> rows;
        for (int s = 0; s < problem.mdp.n_states; ++s) {
            const auto center = bin_center(s, *problem.spec);
            rows.push_back(std::to_string(s) + "," + format_double(center[0]) + "," +
                           format_double(center[1]) + "," + format_double(values[s]));
        }
        write_csv(join_out(out_dir, name), "state_index,dim0_center,dim1_center,value", rows);
    };
    emit(model_map, "value_map_model.csv");
    emit(oracle.v, "value_map_oracle.csv");
    return {"value_map_model.csv", "value_map_oracle.csv"};
}

// ---------------------------------------------------------------- control

std::vector<std::string> cmd_control(const Config& config, const std::string& out_dir) {
    Problem problem = build_problem(config);

    AcConfig base;
    base.gamma = config_get_double(config, "gamma", 0.8);
    base.gamma_tilde = config_get_double(config, "gamma_tilde", 0.99);
    base.horizon = config_get_int(config, "horizon", 1);
    base.q_step = config_get_double(config, "q_step", 0.2);
    base.v_step = config_get_double(config, "v_step", 0.2);
    const double default_temperature = problem.env == "pendulum" ? 0.1 : 1.0;
    base.temperature = config_get_double(config, "temperature", default_temperature);
    base.model_step = config_get_double(config, "model_step", 0.5);
    base.model_tau = config_get_double(config, "model_tau", 5e-3);
    base.model_batch = config_get_int(config, "model_batch", 32);
    base.model_update_every = config_get_int(config, "model_update_every", 1);
    base.episodes = config_get_int(config, "episodes", 500);
    base.steps_per_episode = config_get_int(config, "steps_per_episode", 30);
    base.eval_every = config_get_int(config, "eval_every", 10);
    base.eval_episodes = config_get_int(config, "eval_episodes", 10);
    base.replay_capacity =
        static_cast<std::size_t>(config_get_long(config, "replay_capacity", 100000));

    // MVE baseline runs at the terminal-weight-matched rollout length unless
    // overridden
    int mve_horizon = config_get_int(config, "mve_horizon", -1);
    if (mve_horizon < 0) {
        if (base.gamma == base.gamma_tilde || base.gamma == 0.0) {
            mve_horizon = base.horizon;
        } else {
            mve_horizon =
                effective_horizon_match(base.gamma, base.gamma_tilde, base.horizon).rounded;
        }
    }

    const auto estimator_names =
        config_get_string_list(config, "estimators", "gamma_mve,mve,model_free");
    const auto seeds = config_get_double_list(config, "seeds", "0,1,2,3,4");

    std::vector<std::string> artifacts;
    for (const auto& name : estimator_names) {
        const Estimator estimator = estimator_from_name(name);
        for (const double seed_value : seeds) {
            AcConfig run = base;
            run.estimator = estimator;
            run.seed = static_cast<std::uint64_t>(seed_value);
            if (estimator == Estimator::mve) run.horizon = mve_horizon;
            if (estimator == Estimator::mve) run.gamma = 0.0;

            std::unique_ptr<Simulator> sim;
            if (problem.env_id) {
                sim = std::make_unique<DiscretizedSimulator>(*problem.env_id, *problem.spec);
            } else {
                sim = std::make_unique<MdpSimulator>(problem.mdp, problem.initial_dist);
            }
            const ActorCriticResult result = run_actor_critic(*sim, run);

            std::vector<std::string> rows;
            for (const auto& point : result.curve)
                rows.push_back(std::to_string(point.episode) + "," +
                               format_double(point.return_mean) + "," +
                               format_double(point.return_std) + "," + estimator_name(estimator) +
                               "," + std::to_string(static_cast<long>(seed_value)));
            const std::string file_name = "curve_" + estimator_name(estimator) + "_seed" +
                                          std::to_string(static_cast<long>(seed_value)) + ".csv";
            write_csv(join_out(out_dir, file_name), "episode,return_mean,return_std,estimator,seed",
                      rows);
            artifacts.push_back(file_name);
        }
    }
    return artifacts;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"oracle", "train", "sweep-horizon",
                                                   "value-map", "control"};
    return names;
}

CommandStatus run_command(const std::string& command, const Config& config,
                          const std::string& out_dir, std::string* error) {
    const auto started = std::chrono::steady_clock::now();
    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory: " + out_dir);

        std::vector<std::string> artifacts;
        if (command == "oracle") {
            artifacts = cmd_oracle(config, out_dir);
        } else if (command == "train") {
            artifacts = cmd_train(config, out_dir);
        } else if (command == "sweep-horizon") {
            artifacts = cmd_sweep_horizon(config, out_dir);
        } else if (command == "value-map") {
            artifacts = cmd_value_map(config, out_dir);
        } else if (command == "control") {
            artifacts = cmd_control(config, out_dir);
        } else {
            throw ValidationError("unknown command: " + command);
        }

        RunManifest manifest;
        manifest.command = command;
        manifest.config = config;
        manifest.seed = config_get_seed(config);
        manifest.artifacts = artifacts;
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(manifest, join_out(out_dir, "manifest.json"));
        return CommandStatus::ok;
    } catch (const IoError& e) {
        if (error) *error = e.what();
        return CommandStatus::io_failure;
    } catch (const std::exception& e) {
        if (error) *error = e.what();
        return CommandStatus::validation_failure;
    }
}

CommandStatus run_from_manifest(const std::string& manifest_path, const std::string& out_dir,
                                std::string* error) {
    RunManifest manifest;
    try {
        manifest = load_manifest(manifest_path);
    } catch (const IoError& e) {
        if (error) *error = e.what();
        return CommandStatus::io_failure;
    } catch (const std::exception& e) {
        if (error) *error = e.what();
        return CommandStatus::validation_failure;
    }
    return run_command(manifest.command, manifest.config, out_dir, error);
}

}  // namespace gm
