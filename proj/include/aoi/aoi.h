/*
 * aoi.h - C interface to the AoI scheduling toolkit.
 *
 * Every call returns an aoi_status. On failure a thread-local message is
 * available from aoi_last_error() until the next failing call on the same
 * thread. Handles are opaque and must be released with their *_free function;
 * strings returned through char** must be released with aoi_string_free.
 */
#ifndef AOI_AOI_H
#define AOI_AOI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AOI_BUILDING_LIBRARY)
#define AOI_API __declspec(dllexport)
#else
#define AOI_API __declspec(dllimport)
#endif
#else
#define AOI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aoi_status {
    AOI_OK = 0,
    AOI_ERR_INVALID_ARGUMENT = 1,
    AOI_ERR_NO_CONVERGENCE = 2,
    AOI_ERR_TRUNCATION = 3,
    AOI_ERR_NON_MONOTONE = 4,
    AOI_ERR_BRACKET = 5,
    AOI_ERR_PARSE = 6,
    AOI_ERR_IO = 7,
    AOI_ERR_INTERNAL = 8
} aoi_status;

AOI_API const char* aoi_last_error(void);
AOI_API const char* aoi_status_name(aoi_status status);
AOI_API const char* aoi_version(void);
AOI_API void aoi_string_free(char* s);

/* ---- closed-form index quantities ------------------------------------- */

typedef struct aoi_index_info {
    double value;         /* approximate Whittle index */
    double x;             /* auxiliary x */
    int quadratic;        /* 1 if the quadratic branch was taken */
    double condition_lhs; /* d*Delta/a */
    double condition_rhs; /* (a-1)/2 + Delta */
    double quadratic_branch;
    double linear_branch;
} aoi_index_info;

AOI_API aoi_status aoi_delta(double lambda, double p, double* out);
AOI_API aoi_status aoi_approx_index(int64_t a, int64_t d, double lambda, double p, aoi_index_info* out);
AOI_API aoi_status aoi_d1_upper(double subsidy, double lambda, double p, double* out);
AOI_API aoi_status aoi_dstar(double subsidy, double lambda, double p, double* out);
AOI_API aoi_status aoi_threshold_upper(int64_t a, double subsidy, double lambda, double p, double* out);
AOI_API aoi_status aoi_lower_bound(const double* ps, size_t n, double* out);

/* ---- decoupled single-client MDP -------------------------------------- */

typedef struct aoi_solve_options {
    double tol;       /* span stopping tolerance, default 1e-9 */
    int64_t max_iter; /* default 1e6 */
} aoi_solve_options;

AOI_API aoi_solve_options aoi_solve_options_default(void);

typedef struct aoi_solution aoi_solution;

/* a_max = d_max = 0 sizes the grid automatically. Explicit bounds below the
 * minimum truncation fail with AOI_ERR_TRUNCATION. */
AOI_API aoi_status aoi_decoupled_solve(double lambda, double p, double subsidy, int64_t a_max, int64_t d_max,
                                       const aoi_solve_options* opts, aoi_solution** out);
AOI_API void aoi_solution_free(aoi_solution* sol);

AOI_API double aoi_solution_average_cost(const aoi_solution* sol);
AOI_API int64_t aoi_solution_a_max(const aoi_solution* sol);
AOI_API int64_t aoi_solution_d_max(const aoi_solution* sol);
AOI_API int64_t aoi_solution_interior_a(const aoi_solution* sol);
AOI_API int64_t aoi_solution_interior_k(const aoi_solution* sol);
AOI_API int64_t aoi_solution_iterations(const aoi_solution* sol);
AOI_API double aoi_solution_span(const aoi_solution* sol);
AOI_API int aoi_solution_saturated(const aoi_solution* sol);
/* Returns -1 when a is outside 1..a_max. */
AOI_API int64_t aoi_solution_threshold(const aoi_solution* sol, int64_t a);
/* Return NaN / -1 outside the grid; action is 1 for active, 0 for passive. */
AOI_API double aoi_solution_bias(const aoi_solution* sol, int64_t a, int64_t d);
AOI_API int aoi_solution_action(const aoi_solution* sol, int64_t a, int64_t d);
AOI_API size_t aoi_solution_active_count(const aoi_solution* sol);

typedef struct aoi_check {
    int evaluated;
    int passed;
    double residual;
    double tolerance;
    int64_t samples;
} aoi_check;

typedef struct aoi_structure_report {
    aoi_check diagonal_bias;
    aoi_check threshold_gap;
    aoi_check tail_slope_d;
    aoi_check tail_slope_a;
    aoi_check threshold_limit;
    aoi_check monotone_h;
    aoi_check monotone_d;
    aoi_check threshold_type;
    aoi_check threshold_bounds;
    aoi_check closed_form_h;
    int truncation_ok;
    int all_passed;
} aoi_structure_report;

AOI_API aoi_status aoi_verify(const aoi_solution* sol, double tol, aoi_structure_report* out);

AOI_API aoi_status aoi_numeric_whittle(int64_t a, int64_t d, double lambda, double p, double w_hi, double tol_w,
                                       const aoi_solve_options* opts, double* out);

/* ---- joint optimum for one or two clients ------------------------------ */

typedef struct aoi_joint aoi_joint;

AOI_API aoi_status aoi_joint_solve(const double* lambdas, const double* ps, size_t n, int64_t age_cap,
                                   const aoi_solve_options* opts, aoi_joint** out);
AOI_API void aoi_joint_free(aoi_joint* joint);
AOI_API double aoi_joint_average_aoi(const aoi_joint* joint);
AOI_API int64_t aoi_joint_iterations(const aoi_joint* joint);
AOI_API int aoi_joint_saturated(const aoi_joint* joint);
/* delays[i] = a_i, ages[i] = A_i; *client receives the served index or -1 for idle. */
AOI_API aoi_status aoi_joint_decide(const aoi_joint* joint, const int64_t* delays, const int64_t* ages, size_t n,
                                    int* client);

/* ---- simulation --------------------------------------------------------- */

/* Runs every policy listed in the config text; *csv_out receives the CSV
 * (header included). threads = 0 uses AOI_THREADS or hardware concurrency. */
AOI_API aoi_status aoi_simulate_config(const char* config_text, unsigned threads, int timing, char** csv_out);

typedef struct aoi_experiment_options {
    double scale;            /* horizon multiplier, default 1 */
    const int64_t* n_values; /* fig2 client counts, NULL for the preset sweep */
    size_t n_count;
    const double* p_values; /* fig3 variable-half p values, NULL for the preset sweep */
    size_t p_count;
    const char* policies;  /* comma separated policy names, NULL for approx-index,arrival-aware */
    int random_ties;       /* 1 for uniform-random tie breaking */
    uint64_t seed;         /* default 1 */
    uint32_t replications; /* default 4 */
    unsigned threads;      /* 0 = default */
    int timing;            /* 1 fills wallclock_seconds */
} aoi_experiment_options;

AOI_API aoi_experiment_options aoi_experiment_options_default(void);
AOI_API aoi_status aoi_run_experiment(const char* name, const aoi_experiment_options* opts, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* AOI_AOI_H */
