/* alws: one-shot active label selection by maximum Lewis weight sampling.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through this API; every operation reports an alws_status and
 * leaves a human-readable description retrievable via alws_last_error()
 * (thread local). Output parameters are written only on ALWS_OK.
 */
#ifndef ALWS_H
#define ALWS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ALWS_API __attribute__((visibility("default")))

typedef enum alws_status {
    ALWS_OK = 0,
    ALWS_ERR_INVALID_ARGUMENT = 1,
    ALWS_ERR_RANK_DEFICIENT = 2,
    ALWS_ERR_NON_FINITE = 3,
    ALWS_ERR_NOT_CONVERGED = 4,
    ALWS_ERR_NON_POSITIVE_WEIGHT = 5,
    ALWS_ERR_MISMATCHED_LENGTHS = 6,
    ALWS_ERR_MIXED_EXPONENTS = 7,
    ALWS_ERR_ALL_ZERO_WEIGHTS = 8,
    ALWS_ERR_BUDGET_EXCEEDS_SUPPORT = 9,
    ALWS_ERR_CAP_EXCEEDED = 10,
    ALWS_ERR_INDEX_OUT_OF_RANGE = 11,
    ALWS_ERR_DEGENERATE_CONSTRAINT = 12,
    ALWS_ERR_EMPTY_LABELS = 13,
    ALWS_ERR_ABSENT_CLASS = 14,
    ALWS_ERR_QUERY_BUDGET_INFEASIBLE = 15,
    ALWS_ERR_IO = 16,
    ALWS_ERR_PARSE = 17,
    ALWS_ERR_INTERNAL = 18
} alws_status;

typedef enum alws_activation {
    ALWS_ACT_IDENTITY = 0,
    ALWS_ACT_RELU = 1,
    ALWS_ACT_TANH = 2
} alws_activation;

typedef enum alws_format {
    ALWS_FORMAT_CSV = 0,
    ALWS_FORMAT_BINARY = 1,
    ALWS_FORMAT_AUTO = 2
} alws_format;

typedef struct alws_matrix alws_matrix;
typedef struct alws_weights alws_weights;
typedef struct alws_dist alws_dist;
typedef struct alws_plan alws_plan;
typedef struct alws_smatrix alws_smatrix;
typedef struct alws_solution alws_solution;
typedef struct alws_oracle alws_oracle;
typedef struct alws_result alws_result;

typedef struct alws_lewis_config {
    double p;
    int32_t max_iters;
    double fp_tolerance;
    double rank_tolerance;
    double damping; /* 0 = by exponent: 1 for p < 4, 0.5 for p >= 4 */
} alws_lewis_config;

typedef struct alws_distortion {
    double epsilon_hat;  /* distortion of the p-th powers */
    double epsilon_norm; /* same bound on the norm scale */
    int64_t trials;      /* 0 for the exact method */
    int32_t monte_carlo; /* 1 when estimated from random directions */
} alws_distortion;

ALWS_API const char* alws_version(void);
ALWS_API const char* alws_status_name(alws_status status);
/* Description of the most recent failure on this thread; never NULL. */
ALWS_API const char* alws_last_error(void);

/* ---- matrices ---------------------------------------------------------- */

ALWS_API alws_status alws_matrix_create(int64_t rows, int64_t cols,
                                        const double* row_major,
                                        alws_matrix** out);
ALWS_API alws_status alws_matrix_load(const char* path, alws_format format,
                                      alws_matrix** out);
ALWS_API alws_status alws_matrix_save(const alws_matrix* m, const char* path,
                                      alws_format format);
ALWS_API int64_t alws_matrix_rows(const alws_matrix* m);
ALWS_API int64_t alws_matrix_cols(const alws_matrix* m);
/* Copies row-major entries; len must be rows*cols. */
ALWS_API alws_status alws_matrix_copy(const alws_matrix* m, double* buf,
                                      int64_t len);
ALWS_API void alws_matrix_free(alws_matrix* m);

/* ---- weights ----------------------------------------------------------- */

ALWS_API alws_status alws_weights_create(const double* values, int64_t n,
                                         double p, alws_weights** out);
ALWS_API int64_t alws_weights_size(const alws_weights* w);
ALWS_API double alws_weights_exponent(const alws_weights* w);
ALWS_API alws_status alws_weights_copy(const alws_weights* w, double* buf,
                                       int64_t len);
ALWS_API void alws_weights_free(alws_weights* w);

ALWS_API void alws_lewis_config_init(double p, alws_lewis_config* cfg);
ALWS_API alws_status alws_leverage_scores(const alws_matrix* m,
                                          double rank_tolerance,
                                          alws_weights** out);
ALWS_API alws_status alws_lewis_weights(const alws_matrix* m,
                                        const alws_lewis_config* cfg,
                                        alws_weights** out);
ALWS_API alws_status alws_verify_fixed_point(const alws_matrix* m,
                                             const alws_weights* w, double p,
                                             double* residual);

/* ---- sampling ---------------------------------------------------------- */

ALWS_API alws_status alws_max_weight_distribution(
    const alws_weights* const* weights, int64_t k, alws_dist** out);
ALWS_API int64_t alws_dist_size(const alws_dist* d);
ALWS_API int64_t alws_dist_support(const alws_dist* d);
ALWS_API double alws_dist_sum_max_weights(const alws_dist* d);
ALWS_API alws_status alws_dist_copy(const alws_dist* d, double* buf,
                                    int64_t len);
ALWS_API void alws_dist_free(alws_dist* d);

ALWS_API uint64_t alws_default_draw_cap(uint64_t tau);
/* m_cap = 0 selects the default cap. On ALWS_ERR_CAP_EXCEEDED the partial
 * plan is returned through *out and must be freed by the caller. */
ALWS_API alws_status alws_draw_until_distinct(const alws_dist* d, uint64_t tau,
                                              uint64_t seed, uint64_t m_cap,
                                              alws_plan** out);
ALWS_API alws_status alws_draw_iid(const alws_dist* d, uint64_t m,
                                   uint64_t seed, alws_plan** out);
ALWS_API uint64_t alws_plan_draw_count(const alws_plan* p);
ALWS_API uint64_t alws_plan_distinct_count(const alws_plan* p);
ALWS_API uint64_t alws_plan_seed(const alws_plan* p);
ALWS_API alws_status alws_plan_copy_draws(const alws_plan* p, uint64_t* buf,
                                          int64_t len);
ALWS_API alws_status alws_plan_copy_distinct(const alws_plan* p, uint64_t* buf,
                                             int64_t len);
ALWS_API void alws_plan_free(alws_plan* p);

ALWS_API alws_status alws_build_sampling_matrix(const alws_plan* plan,
                                                const alws_dist* dist,
                                                uint64_t n_labeled, double p,
                                                alws_smatrix** out);
ALWS_API alws_status alws_bernoulli_sampling_matrix(const alws_weights* w,
                                                    double beta, double p,
                                                    uint64_t seed,
                                                    alws_smatrix** out);
ALWS_API int64_t alws_smatrix_rows(const alws_smatrix* s);
ALWS_API uint64_t alws_smatrix_source_count(const alws_smatrix* s);
ALWS_API alws_status alws_smatrix_copy(const alws_smatrix* s, uint64_t* indices,
                                       double* scales, int64_t len);
ALWS_API alws_status alws_smatrix_apply(const alws_smatrix* s,
                                        const alws_matrix* m,
                                        alws_matrix** out);
ALWS_API void alws_smatrix_free(alws_smatrix* s);

ALWS_API alws_status alws_sample_size_bound(int64_t d, double p, double eps,
                                            double sum_max_weights, double c,
                                            int64_t* out);

/* ---- regression -------------------------------------------------------- */

/* theta_out must hold cols(a) doubles. */
ALWS_API alws_status alws_solve_lp_regression(const alws_matrix* a,
                                              const double* y, int64_t n,
                                              double p, double tol,
                                              double* theta_out);
ALWS_API alws_status alws_solve_neuron(const alws_matrix* sa, const double* sy,
                                       int64_t n, alws_activation activation,
                                       double p, double eps,
                                       int32_t constrained, uint64_t seed,
                                       alws_solution** out);
ALWS_API int64_t alws_solution_dim(const alws_solution* s);
ALWS_API alws_status alws_solution_copy_theta(const alws_solution* s,
                                              double* buf, int64_t len);
ALWS_API double alws_solution_loss(const alws_solution* s);
ALWS_API double alws_solution_constraint_lhs(const alws_solution* s);
ALWS_API double alws_solution_constraint_rhs(const alws_solution* s);
ALWS_API int32_t alws_solution_converged(const alws_solution* s);
ALWS_API int32_t alws_solution_iterations(const alws_solution* s);
ALWS_API void alws_solution_free(alws_solution* s);

ALWS_API alws_status alws_evaluate_guarantee(
    const alws_matrix* a, const double* y, int64_t n,
    const double* theta_tilde, const double* theta_star, int64_t d,
    alws_activation activation, double p, double eps, double* ratio);

/* ---- pipeline ---------------------------------------------------------- */

ALWS_API alws_status alws_oracle_from_array(const double* labels, int64_t n,
                                            alws_oracle** out);
/* Reads labels lazily from labels_path; appends one "index,label" line per
 * distinct query to audit_path. Pool index i reads file line
 * index_offset + i, so one file can hold the labeled block first. */
ALWS_API alws_status alws_oracle_from_file(const char* labels_path,
                                           const char* audit_path,
                                           uint64_t index_offset,
                                           alws_oracle** out);
ALWS_API uint64_t alws_oracle_query_count(const alws_oracle* o);
ALWS_API void alws_oracle_free(alws_oracle* o);

/* labeled may be NULL when n_labeled == 0. */
ALWS_API alws_status alws_run_one_shot(
    const alws_matrix* const* labeled, const alws_matrix* const* unlabeled,
    int64_t k, const double* labels, int64_t n_labeled, alws_oracle* oracle,
    uint64_t tau, double eps, double p, alws_activation activation,
    const alws_lewis_config* lewis, uint64_t seed, int32_t constrained,
    alws_result** out);
ALWS_API int64_t alws_result_model_count(const alws_result* r);
ALWS_API double alws_result_sum_max_weights(const alws_result* r);
ALWS_API uint64_t alws_result_queries_used(const alws_result* r);
ALWS_API alws_status alws_result_plan(const alws_result* r, alws_plan** out);
ALWS_API alws_status alws_result_solution(const alws_result* r, int64_t model,
                                          alws_solution** out);
ALWS_API void alws_result_free(alws_result* r);

/* ---- verification ------------------------------------------------------ */

ALWS_API alws_status alws_exact_distortion_p2(const alws_matrix* a,
                                              const alws_smatrix* s,
                                              alws_distortion* out);
ALWS_API alws_status alws_monte_carlo_distortion(const alws_matrix* a,
                                                 const alws_smatrix* s,
                                                 double p, int64_t trials,
                                                 uint64_t seed,
                                                 alws_distortion* out);
/* theta_out must hold cols(a) doubles. */
ALWS_API alws_status alws_brute_force_opt(const alws_matrix* a,
                                          const double* y, int64_t n,
                                          alws_activation activation, double p,
                                          int32_t restarts, uint64_t seed,
                                          double* theta_out, double* opt_out);

/* ---- diagnostics ------------------------------------------------------- */

/* sum_out and bound_out must hold k doubles each. */
ALWS_API alws_status alws_max_weight_sum_curve(
    const alws_weights* const* weights, int64_t k, uint64_t n, double* sum_out,
    double* bound_out);
ALWS_API alws_status alws_coverage_kappa(const alws_weights* const* weights,
                                         int64_t k, double t_percent,
                                         double* kappa);
/* universe may be NULL (n_universe 0) to use the observed classes. */
ALWS_API alws_status alws_class_imbalance(const int64_t* labels, int64_t n,
                                          const int64_t* universe,
                                          int64_t n_universe, double* ratio);
/* out must hold k matrix pointers; each is freed with alws_matrix_free. */
ALWS_API alws_status alws_synthetic_backbones(uint64_t n, uint64_t d,
                                              uint64_t k, double correlation,
                                              uint64_t seed,
                                              int32_t identity_rotations,
                                              alws_matrix** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ALWS_H */
