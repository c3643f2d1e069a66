#ifndef UALG_H
#define UALG_H

/* Generated by cbindgen from the ualg-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a quantitative entailment check.
 */
typedef enum UalgQuantVerdict {
  UALG_QUANT_PROVED = 0,
  UALG_QUANT_BOUND = 1,
  UALG_QUANT_UNKNOWN = 2,
} UalgQuantVerdict;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum UalgStatus {
  /**
   * Success.
   */
  UALG_STATUS_OK = 0,
  /**
   * Input data could not be parsed or validated.
   */
  UALG_STATUS_MALFORMED = 1,
  /**
   * A configured size cap would be exceeded.
   */
  UALG_STATUS_SIZE_LIMIT = 2,
  /**
   * A required pointer argument was null.
   */
  UALG_STATUS_NULL_POINTER = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  UALG_STATUS_UTF8 = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  UALG_STATUS_PANIC = 5,
} UalgStatus;

/**
 * Opaque handle to a finite algebra.
 */
typedef struct UalgAlgebra UalgAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Borrowed; valid
 * until the next ualg call on the same thread.
 */
const char *ualg_last_error_message(void);

/**
 * Frees a string returned by this library. Null is ignored.
 */
void ualg_string_free(char *s);

/**
 * Parses an algebra from its JSON file format into a new handle.
 */
enum UalgStatus ualg_algebra_parse_json(const char *json, struct UalgAlgebra **out);

/**
 * Releases an algebra handle. Null is ignored.
 */
void ualg_algebra_free(struct UalgAlgebra *algebra);

/**
 * Carrier size of the algebra; 0 for a null handle.
 */
uintptr_t ualg_algebra_size(const struct UalgAlgebra *algebra);

/**
 * Serializes the algebra back to its JSON file format.
 */
enum UalgStatus ualg_algebra_to_json(const struct UalgAlgebra *algebra, char **out_json);

/**
 * Does the algebra satisfy the equation (JSON, CLI format)? On a negative
 * answer and a non-null `out_witness_json`, the falsifying assignment is
 * returned as JSON.
 */
enum UalgStatus ualg_satisfies_equation(const struct UalgAlgebra *algebra,
                                        const char *equation_json,
                                        bool *out_satisfied,
                                        char **out_witness_json);

/**
 * Least congruence containing the pairs (`[[a,b],..]` JSON); returns the
 * block structure as JSON.
 */
enum UalgStatus ualg_congruence_generated(const struct UalgAlgebra *algebra,
                                          const char *pairs_json,
                                          char **out_blocks_json);

/**
 * Quotient by the least congruence containing the pairs; returns a new
 * algebra handle and, when requested, the JSON certificate with the
 * surjection and blocks.
 */
enum UalgStatus ualg_quotient(const struct UalgAlgebra *algebra,
                              const char *pairs_json,
                              struct UalgAlgebra **out_quotient,
                              char **out_certificate_json);

/**
 * Is `candidate` in the variety generated by `class_algebra`? The JSON
 * certificate carries the witnessing surjection or the separating identity.
 */
enum UalgStatus ualg_hsp_member(const struct UalgAlgebra *class_algebra,
                                const struct UalgAlgebra *candidate,
                                bool *out_member,
                                char **out_certificate_json);

/**
 * Bounded proof search from JSON axioms (array of equations) to a JSON
 * goal equation, with the signature inferred from the terms. On success
 * `out_found` tells whether a proof exists within the depth; the proof is
 * returned as JSON.
 */
enum UalgStatus ualg_derive(const char *axioms_json,
                            const char *goal_json,
                            uintptr_t depth,
                            bool *out_found,
                            char **out_proof_json);

/**
 * Checks a JSON proof tree against JSON axioms (signature inferred from
 * both).
 */
enum UalgStatus ualg_check_proof(const char *axioms_json, const char *proof_json, bool *out_valid);

/**
 * Quantitative entailment at a depth. `out_json` carries the proof when
 * proved, or the best derived bound as `{"best_epsilon": ..}`.
 */
enum UalgStatus ualg_quant_entails(const char *axioms_json,
                                   const char *goal_json,
                                   uintptr_t depth,
                                   enum UalgQuantVerdict *out_verdict,
                                   char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UALG_H */
