/* C interface to the gamma-model library. All entry points return a
 * gm_status; on failure gm_last_error() carries a message for the calling
 * thread. Objects are opaque handles owned by the caller and released with
 * the matching _destroy function. Array arguments are caller-allocated,
 * flat, row-major: transition tensors are [state][action][next_state],
 * policies and Q tables are [state][action].
 */
#ifndef GAMMAMODEL_CAPI_H
#define GAMMAMODEL_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GM_API __declspec(dllexport)
#else
#define GM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int gm_status;
#define GM_OK 0
#define GM_ERR_VALIDATION 1 /* bad arguments, shapes, or failed invariants */
#define GM_ERR_IO 2         /* unreadable/unwritable paths, malformed files */

/* Message for the last failing call on this thread; empty string if none. */
GM_API const char* gm_last_error(void);

typedef struct gm_mdp gm_mdp;
typedef struct gm_policy gm_policy;
typedef struct gm_model gm_model;
typedef struct gm_dataset gm_dataset;

/* ------------------------------------------------------------------ MDPs */

GM_API gm_status gm_mdp_create(int n_states, int n_actions, const double* transition,
                               const double* reward, gm_mdp** out);
GM_API gm_status gm_mdp_gridworld(int size, gm_mdp** out);
GM_API gm_status gm_mdp_swap_chain(gm_mdp** out);
GM_API gm_status gm_mdp_random(int n_states, int n_actions, uint64_t seed, gm_mdp** out);
/* env is "pendulum" or "mountain_car"; bins has one entry per state
 * dimension. */
GM_API gm_status gm_mdp_discretized(const char* env, const int* bins, int n_dims, int n_actions,
                                    gm_mdp** out);
GM_API void gm_mdp_destroy(gm_mdp* mdp);
GM_API int gm_mdp_n_states(const gm_mdp* mdp);
GM_API int gm_mdp_n_actions(const gm_mdp* mdp);
GM_API gm_status gm_mdp_reward(const gm_mdp* mdp, double* out /* n_states */);
/* Number of invariant violations (0 for a valid MDP). */
GM_API gm_status gm_mdp_validate(const gm_mdp* mdp, int* n_violations);

/* -------------------------------------------------------------- policies */

GM_API gm_status gm_policy_uniform(int n_states, int n_actions, gm_policy** out);
GM_API gm_status gm_policy_create(int n_states, int n_actions, const double* probs,
                                  gm_policy** out);
GM_API void gm_policy_destroy(gm_policy* policy);

/* --------------------------------------------------------------- oracles */

/* Exact discounted occupancy as a model handle tagged with gamma. */
GM_API gm_status gm_exact_occupancy(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                    gm_model** out);
/* Successor representation into a caller buffer of n_states * n_actions *
 * n_states entries. */
GM_API gm_status gm_exact_successor(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                    double* out);
GM_API gm_status gm_policy_evaluation(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                      double* v_out /* n_states */,
                                      double* q_out /* n_states * n_actions, may be NULL */);
GM_API gm_status gm_value_iteration(const gm_mdp* mdp, double gamma, double tolerance,
                                    double* v_out /* n_states */,
                                    int* greedy_out /* n_states, may be NULL */);
GM_API gm_status gm_monte_carlo_occupancy(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                          int s, int a, long n_samples, uint64_t seed,
                                          double* out /* n_states */);

/* ---------------------------------------------------------------- models */

GM_API gm_status gm_model_uniform(int n_states, int n_actions, double gamma, gm_model** out);
GM_API void gm_model_destroy(gm_model* model);
GM_API int gm_model_n_states(const gm_model* model);
GM_API int gm_model_n_actions(const gm_model* model);
GM_API double gm_model_gamma(const gm_model* model);
GM_API gm_status gm_model_probabilities(const gm_model* model, int s, int a,
                                        double* out /* n_states */);
GM_API gm_status gm_model_save(const gm_model* model, const char* path);
GM_API gm_status gm_model_load(const char* path, gm_model** out);

/* -------------------------------------------------------------- datasets */

GM_API gm_status gm_dataset_collect(const gm_mdp* mdp, const gm_policy* policy, long n_steps,
                                    long episode_length, uint64_t seed, gm_dataset** out);
GM_API gm_status gm_dataset_enumerate(const gm_mdp* mdp, int copies_per_pair, uint64_t seed,
                                      gm_dataset** out);
GM_API gm_status gm_dataset_save(const gm_dataset* dataset, const char* path);
GM_API gm_status gm_dataset_load(const char* path, gm_dataset** out);
GM_API long gm_dataset_size(const gm_dataset* dataset);
GM_API void gm_dataset_destroy(gm_dataset* dataset);

/* -------------------------------------------------------------- training */

typedef struct gm_train_options {
    double step_size;      /* cross-entropy step on the live logits */
    double tau;            /* target delay parameter */
    int batch_size;
    long steps;
    int samples_per_pair;  /* exit-state draws per sampled transition */
    uint64_t seed;
} gm_train_options;

/* Fills in the library defaults (step 1e-2, tau 5e-3, batch 128, 50000
 * steps, 1 sample, seed 0). */
GM_API void gm_train_options_init(gm_train_options* options);

GM_API gm_status gm_train_sampled(const gm_dataset* dataset, const gm_policy* policy, double gamma,
                                  const gm_train_options* options, gm_model** out);
GM_API gm_status gm_train_expected(const gm_mdp* mdp, const gm_policy* policy, double gamma,
                                   int sweeps, gm_model** out);

/* ------------------------------------------------- rollouts and horizons */

GM_API gm_status gm_rollout_weights(double gamma, double gamma_tilde, int horizon,
                                    double* alphas_out /* horizon */, double* tail_out);
GM_API gm_status gm_steps_to_mass(double gamma, double gamma_tilde, double coverage, int* out);
GM_API gm_status gm_negative_binomial_pmf(int n, double gamma, long t, double* out);
/* action < 0 starts state-conditioned. */
GM_API gm_status gm_reweighted_distribution(const gm_model* model, const gm_policy* policy,
                                            int state, int action, double gamma_tilde, int horizon,
                                            double* dist_out /* n_states */, double* tail_out);

/* --------------------------------------------------------- value queries */

GM_API gm_status gm_q_from_model(const gm_model* model, const double* reward, int s, int a,
                                 double* out);
GM_API gm_status gm_gamma_mve(const gm_model* model, const gm_policy* policy, const double* reward,
                              const double* v, int s, int horizon, double gamma_tilde,
                              double* value_out, double* model_term_out /* may be NULL */,
                              double* terminal_term_out /* may be NULL */);
GM_API gm_status gm_terminal_weight(double gamma, double gamma_tilde, int horizon, double* out);

/* ---------------------------------------------------------- CLI commands */

/* Runs a named command ("oracle", "train", "sweep-horizon", "value-map",
 * "control"). config_path may be NULL; overrides are `key=value` tokens
 * applied on top of the file. Artifacts and a run manifest are written to
 * out_dir. The returned status matches the CLI exit-code contract. */
GM_API gm_status gm_run_command(const char* command, const char* config_path,
                                const char* const* overrides, int n_overrides,
                                const char* out_dir);

/* Re-executes the command recorded in a manifest, reproducing its artifact
 * files in out_dir. */
GM_API gm_status gm_rerun_manifest(const char* manifest_path, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GAMMAMODEL_CAPI_H */
