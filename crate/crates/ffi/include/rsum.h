#ifndef RSUM_H
#define RSUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.
 */
typedef enum RsumStatus {
  RSUM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RSUM_STATUS_NULL_POINTER = 1,
  /**
   * Invalid argument: bad arity, magnitude out of range, malformed string.
   */
  RSUM_STATUS_DOMAIN = 2,
  /**
   * The candidate count exceeded the threshold and no fallback was set. A
   * partial report is still returned.
   */
  RSUM_STATUS_CAPACITY = 3,
  /**
   * Internal inconsistency between filter structures.
   */
  RSUM_STATUS_CONSISTENCY = 4,
  /**
   * The generator could not build the requested instance.
   */
  RSUM_STATUS_GENERATION = 5,
  /**
   * Malformed instance file.
   */
  RSUM_STATUS_PARSE = 6,
  RSUM_STATUS_IO = 7,
  RSUM_STATUS_PANIC = 8,
} RsumStatus;

typedef enum RsumFamily {
  RSUM_FAMILY_UNIFORM = 0,
  RSUM_FAMILY_PLANTED = 1,
  RSUM_FAMILY_NO_SOLUTION = 2,
  RSUM_FAMILY_ADVERSARIAL = 3,
} RsumFamily;

typedef enum RsumThreshold {
  /**
   * `n^(3/2r)`.
   */
  RSUM_THRESHOLD_AUTO = 0,
  /**
   * `n^(1/2) / (log2 n)^(1/r)`.
   */
  RSUM_THRESHOLD_SECONDARY = 1,
  /**
   * Always enumerate the filtered candidates.
   */
  RSUM_THRESHOLD_UNLIMITED = 2,
  /**
   * Use `threshold_value`.
   */
  RSUM_THRESHOLD_FIXED = 3,
} RsumThreshold;

typedef enum RsumFallback {
  RSUM_FALLBACK_MEET_IN_THE_MIDDLE = 0,
  RSUM_FALLBACK_BRUTE_FORCE = 1,
  RSUM_FALLBACK_NONE = 2,
} RsumFallback;

typedef enum RsumSelection {
  RSUM_SELECTION_TABLES = 0,
  RSUM_SELECTION_VARIANTS = 1,
} RsumSelection;

typedef enum RsumOracle {
  RSUM_ORACLE_BRUTE = 0,
  RSUM_ORACLE_MITM = 1,
} RsumOracle;

/**
 * Opaque instance handle.
 */
typedef struct RsumInstance RsumInstance;

/**
 * Opaque report handle.
 */
typedef struct RsumReport RsumReport;

/**
 * Solver settings. Start from [`rsum_solver_options_default`].
 */
typedef struct RsumSolverOptions {
  size_t r;
  bool allow_repeats;
  enum RsumThreshold threshold;
  uint64_t threshold_value;
  enum RsumFallback fallback;
  enum RsumSelection selection;
  /**
   * 0 keeps the default.
   */
  size_t confluence_count;
  /**
   * 0 keeps the default.
   */
  size_t block_width;
} RsumSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rsum_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rsum_version(void);

/**
 * Copies `len` values into a new instance.
 */
enum RsumStatus rsum_instance_from_values(const int64_t *values,
                                          size_t len,
                                          struct RsumInstance **out);

/**
 * Reads an instance file.
 */
enum RsumStatus rsum_instance_read(const char *path, struct RsumInstance **out);

/**
 * Writes an instance file.
 */
enum RsumStatus rsum_instance_write(const struct RsumInstance *instance, const char *path);

/**
 * Generates a seeded instance. `r` is used by the planted and adversarial
 * families.
 */
enum RsumStatus rsum_instance_generate(enum RsumFamily family,
                                       size_t n,
                                       uint64_t bound,
                                       size_t r,
                                       uint64_t seed,
                                       struct RsumInstance **out);

/**
 * Number of values; 0 for a null handle.
 */
size_t rsum_instance_len(const struct RsumInstance *instance);

/**
 * Borrowed pointer to the values, valid while the instance lives.
 */
const int64_t *rsum_instance_values(const struct RsumInstance *instance);

/**
 * Number of planted ordinals (0 if none). Copies up to `capacity` of them
 * into `out` when `out` is not null.
 */
size_t rsum_instance_planted(const struct RsumInstance *instance, uint32_t *out, size_t capacity);

void rsum_instance_free(struct RsumInstance *instance);

/**
 * Default settings for arity `r`.
 */
struct RsumSolverOptions rsum_solver_options_default(size_t r);

/**
 * Solves `instance`. On [`RsumStatus::Ok`] and [`RsumStatus::Capacity`],
 * `*out` receives a report (partial and without solutions for the
 * latter); otherwise `*out` is set to null.
 */
enum RsumStatus rsum_solve(const struct RsumInstance *instance,
                           const struct RsumSolverOptions *options,
                           struct RsumReport **out);

/**
 * Solves with a baseline algorithm.
 */
enum RsumStatus rsum_oracle(const struct RsumInstance *instance,
                            size_t r,
                            enum RsumOracle algo,
                            bool allow_repeats,
                            struct RsumReport **out);

size_t rsum_report_solution_count(const struct RsumReport *report);

/**
 * Ordinals per solution.
 */
size_t rsum_report_arity(const struct RsumReport *report);

/**
 * Copies solution `index` (arity-many sorted ordinals) into `out`, which
 * must have room for [`rsum_report_arity`] entries.
 */
enum RsumStatus rsum_report_solution(const struct RsumReport *report, size_t index, uint32_t *out);

/**
 * Whether a baseline produced the solutions. False for oracle reports.
 */
bool rsum_report_fallback_used(const struct RsumReport *report);

/**
 * Candidate variants left after filtering. 0 for oracle reports.
 */
uint64_t rsum_report_variant_count(const struct RsumReport *report);

/**
 * Tables in the filtered candidate set. 0 for oracle reports.
 */
size_t rsum_report_theta_size(const struct RsumReport *report);

/**
 * Ordinals stored across all ordinal indexes. 0 for oracle reports.
 */
size_t rsum_report_stored_ordinals(const struct RsumReport *report);

/**
 * The report as JSON, in the same shape the `rsum` CLI prints. Free the
 * result with [`rsum_string_free`]. Returns null on failure.
 */
char *rsum_report_to_json(const struct RsumReport *report);

void rsum_string_free(char *s);

void rsum_report_free(struct RsumReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSUM_H */
