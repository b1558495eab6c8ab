/* Robust soft-label sampling: minimax-optimal acquisition distributions,
 * duality certificates, batch rounding, mislabel estimation, and two
 * desk-scale simulators, behind a plain C ABI.
 *
 * Conventions:
 *   - Every function returns a rad_status; RAD_OK is 0. On failure a
 *     thread-local message is available via rad_last_error().
 *   - Out-parameters are written only on RAD_OK.
 *   - Objects returned through handle out-parameters must be released with
 *     the matching _free function; strings with rad_string_free().
 *   - Losses are passed as an array aligned with gains, or NULL for zero
 *     losses. Relative losses (loss = w * gain) have dedicated entry points.
 */
#ifndef RAD_H
#define RAD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rad_status {
  RAD_OK = 0,
  RAD_ERR_EMPTY_INSTANCE = 1,
  RAD_ERR_INVALID_BUDGET = 2,
  RAD_ERR_INVALID_WEIGHT = 3,
  RAD_ERR_INVALID_LOSS = 4,
  RAD_ERR_NON_FINITE_INPUT = 5,
  RAD_ERR_DIMENSION_MISMATCH = 6,
  RAD_ERR_NOT_A_DISTRIBUTION = 7,
  RAD_ERR_INVALID_BATCH = 8,
  RAD_ERR_NON_INTEGRAL_TOTAL = 9,
  RAD_ERR_OUT_OF_RANGE = 10,
  RAD_ERR_TOO_LARGE = 11,
  RAD_ERR_INVALID_STEP = 12,
  RAD_ERR_TOO_FEW_CLASSES = 13,
  RAD_ERR_NOT_NORMALIZED = 14,
  RAD_ERR_EMPTY_VALIDATION = 15,
  RAD_ERR_CONFIG = 16,
  RAD_ERR_BUDGET_EXHAUSTED = 17,
  RAD_ERR_POOL_EXHAUSTED = 18,
  RAD_ERR_NON_FINITE_LOSS = 19,
  RAD_ERR_IO = 20,
  RAD_ERR_INTERNAL = 21,
} rad_status;

const char* rad_version(void);
const char* rad_status_name(rad_status status);
/* Message describing the most recent failure on this thread ("" if none). */
const char* rad_last_error(void);

void rad_string_free(char* s);

/* ---- Solver ---------------------------------------------------------- */

typedef struct rad_solution rad_solution;

/* Arbitrary non-negative losses; losses == NULL means zero losses. */
rad_status rad_solve_general(const double* gains, size_t n, const double* losses,
                             double m, rad_solution** out);
/* Losses relative to the gain: loss_i = w * gain_i, w in [0,1]. */
rad_status rad_solve_relative(const double* gains, size_t n, double m, double w,
                              rad_solution** out);

size_t rad_solution_size(const rad_solution* s);
int64_t rad_solution_support_size(const rad_solution* s);
double rad_solution_value(const rad_solution* s);
int rad_solution_should_abstain(const rad_solution* s);
/* Copies the full probability vector (input order) into buf[0..n). */
rad_status rad_solution_probs(const rad_solution* s, double* buf, size_t buflen);
void rad_solution_free(rad_solution* s);

/* Penalization weight guaranteeing a non-negative game value: 1 - m/n. */
rad_status rad_default_w(double m, size_t n, double* out);

/* Exact worst-case expected payoff of an arbitrary distribution. */
rad_status rad_game_value(const double* gains, size_t n, const double* losses,
                          double m, const double* probs, double* out);

/* ---- Optimality certificate ------------------------------------------ */

typedef struct rad_certificate rad_certificate;

rad_status rad_build_certificate(const double* gains, size_t n, const double* losses,
                                 double m, const rad_solution* solution,
                                 rad_certificate** out);

double rad_certificate_upper_bound(const rad_certificate* c);
double rad_certificate_mass_residual(const rad_certificate* c);
double rad_certificate_gap(const rad_certificate* c);
rad_status rad_certificate_mask(const rad_certificate* c, double* buf, size_t buflen);
void rad_certificate_free(rad_certificate* c);

typedef enum rad_verdict {
  RAD_VERDICT_OPTIMAL = 0,
  RAD_VERDICT_SUBOPTIMAL = 1,
  RAD_VERDICT_INFEASIBLE = 2,
} rad_verdict;

/* Checks F(p) = opt = UB(c*) within tol (relative) plus feasibility. A
 * human-readable reason for non-optimal verdicts is copied into reason. */
rad_status rad_verify(const double* gains, size_t n, const double* losses, double m,
                      const rad_solution* solution, double tol, rad_verdict* verdict,
                      double* gap, char* reason, size_t reason_len);

/* Brute-force simplex-grid maximization for n <= 4 (independent oracle). */
rad_status rad_grid_oracle(const double* gains, size_t n, const double* losses,
                           double m, double step, double* best_value,
                           uint64_t* evaluations);

/* ---- Batch planning and rounding -------------------------------------- */

typedef enum rad_plan_mode {
  RAD_PLAN_PAPER_CAP = 0, /* q = min(b p, 1); feeds Bernoulli rounding */
  RAD_PLAN_WATER_FILL = 1 /* rescale uncapped mass to hit an integral total */
} rad_plan_mode;

/* q_out must hold n entries; effective_total may be NULL. */
rad_status rad_plan_batch(const double* probs, size_t n, int64_t b,
                          rad_plan_mode mode, double* q_out, double* effective_total);

rad_status rad_max_safe_batch(const double* probs, size_t n, int64_t* out);

/* Exact-size dependent rounding (sum q must be integral within 1e-9).
 * Writes the selected indices (ascending) and their count. */
rad_status rad_dep_round(const double* q, size_t n, uint64_t seed, size_t* idx_out,
                         size_t idx_cap, size_t* out_count);

/* Independent per-point inclusion. */
rad_status rad_bernoulli_round(const double* q, size_t n, uint64_t seed,
                               size_t* idx_out, size_t idx_cap, size_t* out_count);

/* ---- Gains ------------------------------------------------------------ */

rad_status rad_margin(const double* prediction, size_t k, double* out);
rad_status rad_margin_gain(const double* prediction, size_t k, double* out);
rad_status rad_entropy_gain(const double* prediction, size_t k, double* out);

/* ---- Mislabel estimation ---------------------------------------------- */

/* JSON result: m_hat, err_rate, bound, pool_size, validation_size, delta. */
rad_status rad_estimate_m(const int* predicted, const int* actual, size_t k,
                          size_t pool_size, double delta, int conservative,
                          char** json_out);
rad_status rad_shrink_m(double m_hat, double epsilon, double* out);

/* ---- Simulators (JSON config in, JSON trace + CSV out) ----------------- */

rad_status rad_simulate_game(const char* config_json, char** trace_json,
                             char** rounds_csv);
rad_status rad_simulate_distill(const char* config_json, char** trace_json,
                                char** iters_csv);

/* Median solve wall time per instance size; CSV columns n,median_seconds. */
rad_status rad_bench_solve(const uint64_t* sizes, size_t count, int repeats,
                           uint64_t seed, char** csv_out);

/* Canonical re-serialization (sorted keys, %.17g floats); determinism of all
 * emitted artifacts is byte-testable through this form. */
rad_status rad_json_canonicalize(const char* json_text, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RAD_H */
