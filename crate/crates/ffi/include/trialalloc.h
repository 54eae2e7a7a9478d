#ifndef TRIALALLOC_H
#define TRIALALLOC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TaStatus {
  TA_STATUS_OK = 0,
  TA_STATUS_NULL_POINTER = 1,
  TA_STATUS_INVALID_UTF8 = 2,
  TA_STATUS_JSON = 3,
  TA_STATUS_VALIDATION = 4,
  TA_STATUS_DOMAIN = 5,
  TA_STATUS_BUFFER_TOO_SMALL = 6,
  TA_STATUS_PANIC = 7,
} TaStatus;

typedef enum TaSurvivalMethod {
  TA_SURVIVAL_METHOD_JUNG = 0,
  TA_SURVIVAL_METHOD_CHOW = 1,
} TaSurvivalMethod;

typedef enum TaTruth {
  TA_TRUTH_NULL_BOUNDARY = 0,
  TA_TRUTH_ALTERNATIVE = 1,
} TaTruth;

/**
 * Parsed and validated design.
 */
typedef struct TaDesign TaDesign;

typedef struct TaAllocation {
  double control_fraction;
  /**
   * Treatment:control ratio for two arms; the first treatment arm otherwise.
   */
  double ratio_treatment_to_control;
  double are_vs_balanced;
  /**
   * Number of arms, control included.
   */
  size_t n_arms;
} TaAllocation;

typedef struct TaSampleSize {
  uint64_t n_control;
  uint64_t n_treatment;
  uint64_t n_total;
  double n_total_unrounded;
  double h_used;
  double are_vs_balanced;
} TaSampleSize;

typedef struct TaEvents {
  uint64_t d_events;
  double p;
} TaEvents;

typedef struct TaSimulation {
  double estimate;
  double standard_error;
  uint64_t rejections;
  uint64_t replications;
} TaSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a design from NUL-terminated UTF-8 JSON.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer. On success the
 * caller owns `*out` and must release it with [`ta_design_free`].
 */
enum TaStatus ta_design_from_json(const char *json, struct TaDesign **out);

/**
 * Releases a design. Null is ignored.
 *
 * # Safety
 * `design` must come from [`ta_design_from_json`] and not be freed twice.
 */
void ta_design_free(struct TaDesign *design);

/**
 * Optimal allocation summary.
 *
 * # Safety
 * `handle` must be a live design and `out` a valid pointer.
 */
enum TaStatus ta_allocate(const struct TaDesign *handle, struct TaAllocation *out);

/**
 * Copies the per-arm optimal fractions (control first) into `buf`.
 *
 * `*written` receives the number of arms. If `len` is too small nothing is
 * copied and `TA_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `buf` must point to `len` writable doubles; `written` must be valid.
 */
enum TaStatus ta_allocate_fractions(const struct TaDesign *handle,
                                    double *buf,
                                    size_t len,
                                    size_t *written);

/**
 * Per-arm sample sizes at control fraction `h` (NaN: optimal).
 *
 * # Safety
 * `handle` must be a live design and `out` a valid pointer.
 */
enum TaStatus ta_sample_size(const struct TaDesign *handle, double h, struct TaSampleSize *out);

/**
 * Analytic power of the design at the given arm sizes.
 *
 * # Safety
 * `handle` must be a live design and `out` a valid pointer.
 */
enum TaStatus ta_achieved_power(const struct TaDesign *handle,
                                uint64_t n_control,
                                uint64_t n_treatment,
                                double *out);

/**
 * Variance at treatment:control ratio `r` relative to the optimum.
 *
 * # Safety
 * `handle` must be a live design and `out` a valid pointer.
 */
enum TaStatus ta_efficiency_at_ratio(const struct TaDesign *handle, double r, double *out);

/**
 * Event-count-minimizing control fraction for hazard-ratio margin `delta0`.
 * NaN `alpha`/`power` select 0.025 and 0.9.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TaStatus ta_optimal_event_fraction(double delta0, double alpha, double power, double *out);

/**
 * Required number of events. NaN `p` selects the method's optimal fraction.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TaStatus ta_events(double delta0,
                        double alpha,
                        double power,
                        enum TaSurvivalMethod method,
                        double p,
                        struct TaEvents *out);

/**
 * Monte-Carlo rejection rate. `workers` = 0 uses all cores; the result does
 * not depend on it.
 *
 * # Safety
 * `handle` must be a live design and `out` a valid pointer.
 */
enum TaStatus ta_simulate(const struct TaDesign *handle,
                          uint64_t n_control,
                          uint64_t n_treatment,
                          enum TaTruth truth,
                          uint64_t reps,
                          uint64_t seed,
                          size_t workers,
                          struct TaSimulation *out);

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ta_last_error_message(void);

/**
 * Library version as a static C string.
 */
const char *ta_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIALALLOC_H */
