#ifndef SIGNSGD_BFT_H
#define SIGNSGD_BFT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsbRateForm {
  SSB_RATE_FORM_PROOF_FINAL = 0,
  SSB_RATE_FORM_STATEMENT = 1,
} SsbRateForm;

typedef enum SsbStatus {
  SSB_STATUS_OK = 0,
  SSB_STATUS_NULL_POINTER = 1,
  SSB_STATUS_INVALID_INPUT = 2,
  SSB_STATUS_INFEASIBLE = 3,
  SSB_STATUS_DIMENSION_MISMATCH = 4,
  SSB_STATUS_NON_FINITE = 5,
  SSB_STATUS_CAPABILITY = 6,
  SSB_STATUS_DIVISION_BY_ZERO = 7,
  SSB_STATUS_BUFFER_TOO_SMALL = 8,
  SSB_STATUS_PANIC = 9,
} SsbStatus;

/**
 * Opaque run configuration.
 */
typedef struct SsbConfig SsbConfig;

/**
 * Opaque result of one simulated run.
 */
typedef struct SsbRun SsbRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ssb_version(void);

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 */
size_t ssb_last_error_message(char *buf, size_t len);

/**
 * Parse a JSON config. A `provenance` object is ignored; unknown keys fail.
 */
enum SsbStatus ssb_config_from_json(const char *json, struct SsbConfig **out);

/**
 * The default toy configuration.
 */
enum SsbStatus ssb_config_default(struct SsbConfig **out);

enum SsbStatus ssb_config_set_seed(struct SsbConfig *config, uint64_t seed);

void ssb_config_free(struct SsbConfig *config);

/**
 * Simulate the configured run.
 */
enum SsbStatus ssb_run(const struct SsbConfig *config, struct SsbRun **out);

/**
 * Number of recorded steps.
 */
size_t ssb_run_steps(const struct SsbRun *run);

enum SsbStatus ssb_run_final_objective(const struct SsbRun *run, double *out);

/**
 * Copy `f(x_t)` for every step into `buf`, which must hold
 * `ssb_run_steps(run)` values.
 */
enum SsbStatus ssb_run_objectives(const struct SsbRun *run, double *buf, size_t len);

/**
 * Copy the per-step flipped-coordinate counts into `buf`.
 */
enum SsbStatus ssb_run_flipped_coords(const struct SsbRun *run, uint64_t *buf, size_t len);

void ssb_run_free(struct SsbRun *run);

/**
 * Majority vote over `workers` row-major sign vectors of length `dim`,
 * entries in {-1, 0, 1}. Writes `dim` signs to `out`.
 */
enum SsbStatus ssb_majority_vote(const int8_t *votes, size_t workers, size_t dim, int8_t *out);

/**
 * Upper bound on the wrong-sign probability at SNR `s`.
 */
enum SsbStatus ssb_lemma1_bound(double s, double *out);

/**
 * `1 - 1/(2p)`.
 */
enum SsbStatus ssb_alpha_threshold(double p, double *out);

/**
 * Raw (unclamped) vote-failure bound.
 */
enum SsbStatus ssb_vote_failure_bound(uint64_t q, double alpha, double p, double *out);

/**
 * Exact vote-failure probability with `b` omniscient adversaries.
 */
enum SsbStatus ssb_exact_vote_failure(uint64_t q, uint64_t b, double p, double *out);

enum SsbStatus ssb_tolerable_byzantine_count(uint64_t q, double p, uint64_t *out);

/**
 * Right-hand side of the convergence rate.
 */
enum SsbStatus ssb_convergence_rate_rhs(uint64_t q,
                                        double alpha,
                                        double p,
                                        double sigma_l1,
                                        double smoothness_l1,
                                        double f0_minus_fstar,
                                        uint64_t k_iters,
                                        enum SsbRateForm form,
                                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNSGD_BFT_H */
