#ifndef ESR_FFI_H
#define ESR_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Dominance criterion selector: 0 = CDF, 1 = PDF.
 */
#define ESR_CRITERION_CDF 0

#define ESR_CRITERION_PDF 1

/*
 Result code of every fallible call.
 */
typedef enum EsrStatus {
  ESR_STATUS_OK = 0,
  ESR_STATUS_NULL_POINTER = 1,
  ESR_STATUS_INVALID_ARGUMENT = 2,
  ESR_STATUS_INVALID_ENVIRONMENT = 3,
  ESR_STATUS_EMPTY_DISTRIBUTION = 4,
  ESR_STATUS_OUT_OF_RANGE = 5,
  ESR_STATUS_BUFFER_TOO_SMALL = 6,
  ESR_STATUS_INTERNAL = 7,
} EsrStatus;

/*
 Opaque environment handle.
 */
typedef struct EsrEnvironment EsrEnvironment;

/*
 Opaque learner handle; owns a copy of its environment and its random streams.
 */
typedef struct EsrLearner EsrLearner;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length, or 0 if none.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
uintptr_t esr_last_error_message(char *buf, uintptr_t len);

/*
 Creates one of the built-in environments (`momab5`, `vrs`, `lottery12`, `lottery34`).

 # Safety
 `name` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EsrStatus esr_environment_preset(const char *name, struct EsrEnvironment **out);

/*
 Parses and validates a JSON environment document.

 # Safety
 `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EsrStatus esr_environment_from_json(const char *json, struct EsrEnvironment **out);

/*
 # Safety
 `env` must be null or a handle from an `esr_environment_*` constructor, not yet freed.
 */
void esr_environment_free(struct EsrEnvironment *env);

/*
 Number of arms, or 0 for a null handle.

 # Safety
 `env` must be null or a live environment handle.
 */
uintptr_t esr_environment_arm_count(const struct EsrEnvironment *env);

/*
 Number of objectives, or 0 for a null handle.

 # Safety
 `env` must be null or a live environment handle.
 */
uintptr_t esr_environment_objectives(const struct EsrEnvironment *env);

/*
 ESR set of the exact arm distributions.

 # Safety
 `env` must be a live handle; `out` must hold `capacity` entries; `out_len` must be valid.
 */
enum EsrStatus esr_environment_esr_set(const struct EsrEnvironment *env,
                                       uint32_t criterion,
                                       uintptr_t *out,
                                       uintptr_t capacity,
                                       uintptr_t *out_len);

/*
 Creates a learner on a copy of `env` and pulls every arm `beta` times.

 # Safety
 `env` must be a live handle; `out` must be a valid pointer.
 */
enum EsrStatus esr_learner_new(const struct EsrEnvironment *env,
                               uint64_t beta,
                               uint32_t criterion,
                               uint64_t seed,
                               struct EsrLearner **out);

/*
 # Safety
 `learner` must be null or a handle from [`esr_learner_new`], not yet freed.
 */
void esr_learner_free(struct EsrLearner *learner);

/*
 One learning step. The pulled arm is written to `out_arm` when non-null.

 # Safety
 `learner` must be a live handle; `out_arm` must be null or valid.
 */
enum EsrStatus esr_learner_step(struct EsrLearner *learner, uintptr_t *out_arm);

/*
 Runs `episodes` learning steps.

 # Safety
 `learner` must be a live handle.
 */
enum EsrStatus esr_learner_run(struct EsrLearner *learner, uint64_t episodes);

/*
 Total pulls so far, or 0 for a null handle.

 # Safety
 `learner` must be null or a live handle.
 */
uint64_t esr_learner_total_pulls(const struct EsrLearner *learner);

/*
 Pull count of one arm.

 # Safety
 `learner` must be a live handle; `out` must be valid.
 */
enum EsrStatus esr_learner_arm_pulls(const struct EsrLearner *learner,
                                     uintptr_t arm,
                                     uint64_t *out);

/*
 Current UCB1 exploration bonus of one arm.

 # Safety
 `learner` must be a live handle; `out` must be valid.
 */
enum EsrStatus esr_learner_ucb_bonus(const struct EsrLearner *learner, uintptr_t arm, double *out);

/*
 Current ESR set, with (`with_bonus != 0`) or without exploration bonuses.

 # Safety
 `learner` must be a live handle; `out` must hold `capacity` entries; `out_len` must be valid.
 */
enum EsrStatus esr_learner_esr_set(const struct EsrLearner *learner,
                                   int32_t with_bonus,
                                   uintptr_t *out,
                                   uintptr_t capacity,
                                   uintptr_t *out_len);

/*
 Empirical probability of `point` (length `dims`) for one arm.

 # Safety
 `learner` must be a live handle; `point` must hold `dims` values; `out` must be valid.
 */
enum EsrStatus esr_learner_pdf(const struct EsrLearner *learner,
                               uintptr_t arm,
                               const double *point,
                               uintptr_t dims,
                               double *out);

/*
 Empirical joint CDF at `point` (length `dims`) for one arm.

 # Safety
 `learner` must be a live handle; `point` must hold `dims` values; `out` must be valid.
 */
enum EsrStatus esr_learner_cdf(const struct EsrLearner *learner,
                               uintptr_t arm,
                               const double *point,
                               uintptr_t dims,
                               double *out);

/*
 F1 coverage ratio of the learner's bonus-free ESR set against the
 environment's ground-truth ESR set.

 # Safety
 `learner` must be a live handle; `out_f1` must be valid.
 */
enum EsrStatus esr_learner_coverage_f1(const struct EsrLearner *learner,
                                       double epsilon,
                                       double *out_f1);

/*
 JSON document of one arm's Z-table. Release with [`esr_string_free`].
 Returns null on error.

 # Safety
 `learner` must be a live handle.
 */
char *esr_learner_table_json(const struct EsrLearner *learner, uintptr_t arm);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void esr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESR_FFI_H */
