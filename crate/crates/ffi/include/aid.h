#ifndef AID_H
#define AID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum AidStatus {
  AID_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  AID_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  AID_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, an invalid prior or structure, or a bad parameter.
   */
  AID_STATUS_INVALID_INPUT = 3,
  /**
   * A constructor could not satisfy its feasibility conditions.
   */
  AID_STATUS_INFEASIBLE = 4,
  /**
   * The library panicked; the handle arguments are left untouched.
   */
  AID_STATUS_PANIC = 5,
} AidStatus;

/**
 * Opaque prior handle.
 */
typedef struct AidPrior AidPrior;

/**
 * Opaque information-structure handle.
 */
typedef struct AidStructure AidStructure;

/**
 * Exact payoffs under the prescribed strategies.
 */
typedef struct AidPayoff {
  double revenue;
  double bidder_surplus;
  double welfare;
  double tie_mass;
} AidPayoff;

/**
 * Summary of an equilibrium audit.
 */
typedef struct AidVerdict {
  bool is_bne;
  bool is_strict;
  double worst_gain;
  double strict_margin;
} AidVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 *
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *aid_last_error(void);

/**
 * Parse and validate a prior from JSON.
 *
 * # Safety
 * `json` must be a valid nul-terminated string and `out` a valid pointer.
 * On success `*out` owns a handle to be released with [`aid_prior_free`].
 */
enum AidStatus aid_prior_from_json(const char *json, struct AidPrior **out);

/**
 * Release a prior handle. Null is ignored.
 *
 * # Safety
 * `prior` must be null or a handle from [`aid_prior_from_json`] not yet freed.
 */
void aid_prior_free(struct AidPrior *prior);

/**
 * Build a structure by constructor name, for example `"full-extraction"`.
 *
 * `params_json` is an object with optional keys `K`, `eps`, `alpha`, `t`,
 * `q`, `R` and `B`; null selects the defaults.
 *
 * # Safety
 * `prior` must be a live prior handle, `kind` a valid nul-terminated
 * string, `params_json` null or a valid nul-terminated string and `out` a
 * valid pointer. On success `*out` owns a handle to be released with
 * [`aid_structure_free`].
 */
enum AidStatus aid_build(const struct AidPrior *prior,
                         const char *kind,
                         const char *params_json,
                         struct AidStructure **out);

/**
 * Parse and validate a structure from JSON.
 *
 * # Safety
 * `json` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum AidStatus aid_structure_from_json(const char *json, struct AidStructure **out);

/**
 * Serialize a structure to JSON.
 *
 * # Safety
 * `structure` must be a live handle and `out` a valid pointer. On success
 * `*out` must be released with [`aid_string_free`].
 */
enum AidStatus aid_structure_to_json(const struct AidStructure *structure, char **out);

/**
 * Release a structure handle. Null is ignored.
 *
 * # Safety
 * `structure` must be null or a handle from this library not yet freed.
 */
void aid_structure_free(struct AidStructure *structure);

/**
 * Exact payoffs when every bidder bids its signal atom.
 *
 * # Safety
 * `structure` must be a live handle and `out` a valid pointer.
 */
enum AidStatus aid_evaluate(const struct AidStructure *structure, struct AidPayoff *out);

/**
 * Audit the prescribed strategies with tolerance `tol`; `report_json` may be
 * null, otherwise it receives the full audit as JSON.
 *
 * # Safety
 * `structure` must be a live handle, `out` a valid pointer and
 * `report_json` null or a valid pointer. A returned report must be
 * released with [`aid_string_free`].
 */
enum AidStatus aid_verify(const struct AidStructure *structure,
                          double tol,
                          struct AidVerdict *out,
                          char **report_json);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void aid_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AID_H */
