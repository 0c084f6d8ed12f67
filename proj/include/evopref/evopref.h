/*
 * C interface to the evopref library: externality-game equilibria, stability
 * classification over behavioral/rational/handshake strategies, and the
 * complexity-penalised adaptive-learning dynamic with its parameter sweeps.
 *
 * Every fallible call returns an evopref_status; on failure a message is
 * available from evopref_last_error() on the calling thread. Handles are
 * opaque and released with the matching *_destroy function. Strings returned
 * through `char**` are owned by the caller and released with
 * evopref_string_free(); `const char*` results are owned by their handle.
 */
#ifndef EVOPREF_H
#define EVOPREF_H

#include <stddef.h>
#include <stdint.h>

#if defined(EVOPREF_BUILDING_LIBRARY)
#define EVOPREF_API __attribute__((visibility("default")))
#else
#define EVOPREF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evopref_status {
  EVOPREF_OK = 0,
  EVOPREF_ERR_INVALID_ARGUMENT = 1,
  EVOPREF_ERR_SINGULAR_EQUILIBRIUM = 2,
  EVOPREF_ERR_NO_ASCENT_PROGRESS = 3,
  EVOPREF_ERR_SEARCH_BUDGET = 4,
  EVOPREF_ERR_IO = 5,
  EVOPREF_ERR_INTERNAL = 6
} evopref_status;

EVOPREF_API const char* evopref_version(void);
EVOPREF_API const char* evopref_status_name(evopref_status status);
/* Message of the last failed call on this thread ("" if none). */
EVOPREF_API const char* evopref_last_error(void);
EVOPREF_API void evopref_string_free(char* s);

/* ---- externality game ------------------------------------------------- */

typedef struct evopref_game {
  double kappa;
  double m;
} evopref_game;

typedef struct evopref_penalties {
  double eps_r;
  double eps_p;
  double eps_h;
} evopref_penalties;

EVOPREF_API evopref_status evopref_payoff(const evopref_game* g, double own, double other,
                                          double* out);
EVOPREF_API evopref_status evopref_subjective_utility(const evopref_game* g, double alpha,
                                                      double own, double other, double* out);
EVOPREF_API evopref_status evopref_best_response(const evopref_game* g, double opponent_action,
                                                 double alpha, double* out);
EVOPREF_API evopref_status evopref_nash_equilibrium(const evopref_game* g, double alpha_i,
                                                    double alpha_j, double* own, double* other);
EVOPREF_API evopref_status evopref_ess_alpha(const evopref_game* g, double* out);

/* ---- strategies and fitness ------------------------------------------- */

typedef enum evopref_strategy_kind {
  EVOPREF_BEHAVIORAL = 0,
  EVOPREF_RATIONAL = 1,
  EVOPREF_HANDSHAKE = 2
} evopref_strategy_kind;

/* Borrowed view: `actions` (behavioral only) has one entry per game. */
typedef struct evopref_strategy {
  evopref_strategy_kind kind;
  double alpha;
  const double* actions;
  size_t n_actions;
} evopref_strategy;

typedef struct evopref_environment evopref_environment;

EVOPREF_API evopref_status evopref_environment_create(const evopref_game* games,
                                                      const double* proportions, size_t n_games,
                                                      evopref_environment** out);
EVOPREF_API void evopref_environment_destroy(evopref_environment* env);

EVOPREF_API evopref_status evopref_resolve_action(const evopref_strategy* own,
                                                  const evopref_strategy* other,
                                                  const evopref_environment* env, size_t game,
                                                  double* out);
EVOPREF_API evopref_status evopref_base_fitness(const evopref_strategy* own,
                                                const evopref_strategy* other,
                                                const evopref_environment* env, double* out);
EVOPREF_API evopref_status evopref_complexity_cost(const evopref_strategy* s,
                                                   const evopref_penalties* pc, double* out);
EVOPREF_API evopref_status evopref_penalized_fitness(const evopref_strategy* own,
                                                     const evopref_strategy* other,
                                                     const evopref_environment* env,
                                                     const evopref_penalties* pc, double* out);

/* ---- stability analysis ----------------------------------------------- */

typedef enum evopref_space {
  EVOPREF_SPACE_B = 0,
  EVOPREF_SPACE_R = 1,
  EVOPREF_SPACE_S = 2,
  EVOPREF_SPACE_S_WITH_H = 3
} evopref_space;

typedef struct evopref_search_config {
  double alpha_min, alpha_max, alpha_step;
  double action_min, action_max, action_step; /* units of m */
  int refine_iterations;
  double tol_eq, tol_strict; /* units of m^2 */
  double identity_radius;
} evopref_search_config;

EVOPREF_API void evopref_search_config_default(evopref_search_config* cfg);

typedef struct evopref_verdict evopref_verdict;

EVOPREF_API evopref_status evopref_classify(const evopref_strategy* candidate, evopref_space space,
                                            const evopref_environment* env,
                                            const evopref_penalties* pc,
                                            const evopref_search_config* cfg,
                                            evopref_verdict** out);
EVOPREF_API int evopref_verdict_is_nash(const evopref_verdict* v);
EVOPREF_API int evopref_verdict_is_nss(const evopref_verdict* v);
EVOPREF_API int evopref_verdict_is_ess(const evopref_verdict* v);
EVOPREF_API double evopref_verdict_margin(const evopref_verdict* v);
/* Returns 0 without a witness; otherwise fills a view valid for v's lifetime. */
EVOPREF_API int evopref_verdict_witness(const evopref_verdict* v, evopref_strategy* out);
EVOPREF_API const char* evopref_verdict_describe(const evopref_verdict* v);
EVOPREF_API void evopref_verdict_destroy(evopref_verdict* v);

typedef struct evopref_report evopref_report;

EVOPREF_API evopref_status evopref_verify_proposition1(const evopref_game* g,
                                                       const evopref_search_config* cfg,
                                                       evopref_report** out);
EVOPREF_API evopref_status evopref_verify_proposition2(const evopref_game* g, double eps_r,
                                                       const evopref_search_config* cfg,
                                                       evopref_report** out);
EVOPREF_API evopref_status evopref_verify_handshake(const evopref_game* g,
                                                    const evopref_penalties* pc,
                                                    const evopref_search_config* cfg,
                                                    evopref_report** out);
EVOPREF_API int evopref_report_passed(const evopref_report* r);
EVOPREF_API const char* evopref_report_text(const evopref_report* r);
EVOPREF_API const char* evopref_report_json(const evopref_report* r);
/* NaN unless produced by evopref_verify_handshake. */
EVOPREF_API double evopref_report_handshake_margin(const evopref_report* r);
EVOPREF_API void evopref_report_destroy(evopref_report* r);

/* ---- adaptive learning ------------------------------------------------ */

typedef enum evopref_learning_space {
  EVOPREF_LEARN_FULL = 0,
  EVOPREF_LEARN_RATIONAL_ONLY = 1,
  EVOPREF_LEARN_BEHAVIORAL_ONLY = 2
} evopref_learning_space;

typedef struct evopref_sim_config {
  size_t population_size;
  int rounds;
  double q1;
  int q_freeze_round;
  uint64_t seed;
  /* G_{kappa1} with proportion p and G_{kappa2} with 1 - p, or only
     G_{kappa1} when single_game is nonzero. */
  double kappa1, kappa2, p, m;
  int single_game;
  evopref_penalties penalties;
  evopref_learning_space space;
  double ascent_step;
  int ascent_max_iterations;
  double ascent_tolerance;
  double action_bound; /* units of m */
} evopref_sim_config;

EVOPREF_API void evopref_sim_config_default(evopref_sim_config* cfg);

typedef enum evopref_final_kind {
  EVOPREF_FINAL_BEHAVIORAL = 0,
  EVOPREF_FINAL_RATIONAL = 1,
  EVOPREF_FINAL_MIXED = 2
} evopref_final_kind;

typedef struct evopref_round_summary {
  int round;
  size_t behavioral;
  size_t rational;
  double mean_alpha; /* NaN without rational agents */
  size_t distinct_actions;
  double welfare;
} evopref_round_summary;

typedef struct evopref_final_summary {
  evopref_final_kind final_kind;
  double mean_alpha;
  size_t distinct_actions;
  double welfare; /* averaged over the final two rounds */
  int converged;
  int oscillating;
} evopref_final_summary;

typedef struct evopref_agent {
  double alpha;
  int behavioral;
  const double* actions; /* valid for the trajectory's lifetime */
  size_t n_actions;
} evopref_agent;

typedef struct evopref_trajectory evopref_trajectory;

EVOPREF_API evopref_status evopref_simulate(const evopref_sim_config* cfg,
                                            evopref_trajectory** out);
/* Number of stored populations: rounds + 1 (round 0 is the initial one). */
EVOPREF_API size_t evopref_trajectory_length(const evopref_trajectory* tr);
EVOPREF_API size_t evopref_trajectory_population_size(const evopref_trajectory* tr);
EVOPREF_API evopref_status evopref_trajectory_summary(const evopref_trajectory* tr, size_t round,
                                                      evopref_round_summary* out);
EVOPREF_API evopref_status evopref_trajectory_agent(const evopref_trajectory* tr, size_t round,
                                                    size_t agent, evopref_agent* out);
EVOPREF_API evopref_status evopref_trajectory_final(const evopref_trajectory* tr,
                                                    evopref_final_summary* out);
/* Per-round summaries and populations as JSON. */
EVOPREF_API evopref_status evopref_trajectory_json(const evopref_trajectory* tr, char** out);
EVOPREF_API void evopref_trajectory_destroy(evopref_trajectory* tr);

EVOPREF_API double evopref_mutation_prob(const evopref_sim_config* cfg, int round);

/* ---- sweeps and records ----------------------------------------------- */

typedef enum evopref_experiment {
  EVOPREF_FIG1 = 0,
  EVOPREF_FIG2 = 1,
  EVOPREF_FIG3 = 2,
  EVOPREF_FIG4 = 3,
  EVOPREF_CUSTOM = 4
} evopref_experiment;

typedef enum evopref_format { EVOPREF_CSV = 0, EVOPREF_JSON = 1 } evopref_format;

typedef struct evopref_sweep evopref_sweep;

/* A sweep preloaded with the published grids of `experiment` (empty for custom). */
EVOPREF_API evopref_status evopref_sweep_create(evopref_experiment experiment,
                                                evopref_sweep** out);
EVOPREF_API void evopref_sweep_destroy(evopref_sweep* s);
/* Rounds, population, mutation, seed, m, eps_r, eps_h, space and ascent
   settings come from `base`; the games and eps_p come from the grids. */
EVOPREF_API evopref_status evopref_sweep_set_base(evopref_sweep* s, const evopref_sim_config* base);
EVOPREF_API evopref_status evopref_sweep_set_replicates(evopref_sweep* s, int replicates);
EVOPREF_API evopref_status evopref_sweep_set_threads(evopref_sweep* s, unsigned threads);
EVOPREF_API evopref_status evopref_sweep_set_kappa_pairs(evopref_sweep* s, const double* kappa1,
                                                         const double* kappa2, size_t n);
EVOPREF_API evopref_status evopref_sweep_set_p_grid(evopref_sweep* s, const double* p, size_t n);
EVOPREF_API evopref_status evopref_sweep_set_eps_p_grid(evopref_sweep* s, const double* eps_p,
                                                        size_t n);
EVOPREF_API evopref_status evopref_sweep_set_output_path(evopref_sweep* s, const char* path);
EVOPREF_API size_t evopref_sweep_point_count(const evopref_sweep* s);

typedef struct evopref_record {
  const char* experiment; /* valid for the owning records handle */
  double kappa1, kappa2, p, eps_p, eps_r;
  uint64_t seed;
  int replicate;
  evopref_final_kind final_kind;
  double mean_alpha;
  size_t distinct_actions;
  double welfare_raw, welfare_norm;
  int converged;
  int oscillating;
} evopref_record;

typedef struct evopref_records evopref_records;

EVOPREF_API evopref_status evopref_sweep_run(const evopref_sweep* s, evopref_records** out);
/* One "custom" record summarising a single simulation. */
EVOPREF_API evopref_status evopref_records_from_trajectory(const evopref_trajectory* tr,
                                                           const evopref_sim_config* cfg,
                                                           evopref_records** out);
EVOPREF_API evopref_status evopref_records_parse(const char* text, evopref_format format,
                                                 evopref_records** out);
EVOPREF_API size_t evopref_records_count(const evopref_records* r);
EVOPREF_API evopref_status evopref_records_get(const evopref_records* r, size_t i,
                                               evopref_record* out);
EVOPREF_API evopref_status evopref_records_serialize(const evopref_records* r,
                                                     evopref_format format, char** out);
EVOPREF_API evopref_status evopref_records_export(const evopref_records* r, evopref_format format,
                                                  const char* path);
EVOPREF_API void evopref_records_destroy(evopref_records* r);

/* Approximately the smallest eps_p in [lo, hi] for which at least
   min_fraction of the sweep's replicates end fully rational. */
EVOPREF_API evopref_status evopref_tune_eps_p(const evopref_sweep* s, double kappa1,
                                              double kappa2, double p, double lo, double hi,
                                              int iterations, double min_fraction,
                                              double* eps_p_out, int* bracketed_out);

#ifdef __cplusplus
}
#endif

#endif /* EVOPREF_H */
