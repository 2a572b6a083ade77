/* C interface to the exact Courant-algebroid curvature engine. */

#pragma once

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum CourantStatus {
  // The operation ran and every check in the report passed.
  CourantStatus_Ok = 0,
  // The operation ran and a mathematical check failed, or structurally
  // well-formed input was rejected on mathematical grounds.
  CourantStatus_CheckFailed = 1,
  // The input could not be parsed at all.
  CourantStatus_InvalidInput = 2,
  // A required pointer argument was null.
  CourantStatus_NullArgument = 3,
  // An internal invariant failed; the library state is still valid.
  CourantStatus_InternalError = 4,
} CourantStatus;

// Opaque validated model handle.
typedef struct CourantModelHandle CourantModelHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *courant_version(void);

// Loads and validates a model file. On success `*out_model` owns the handle
// and `*out_report` is an empty string; on failure `*out_model` stays null
// and `*out_report` carries an error report.
enum CourantStatus courant_model_from_file(const char *path,
                                           struct CourantModelHandle **out_model,
                                           char **out_report);

// Builds a model from JSON text instead of a file.
enum CourantStatus courant_model_from_json(const char *json,
                                           struct CourantModelHandle **out_model,
                                           char **out_report);

// Releases a model handle. Null is a no-op.
void courant_model_free(struct CourantModelHandle *model);

// Model name as a caller-owned string, or null if `model` is null.
char *courant_model_name(const struct CourantModelHandle *model);

// Canonical JSON serialization of the model, caller-owned.
char *courant_model_to_json(const struct CourantModelHandle *model);

// Base dimension, or -1 if `model` is null.
int courant_model_base_dim(const struct CourantModelHandle *model);

// Fiber dimension (0 without a fiber), or -1 if `model` is null.
int courant_model_fiber_dim(const struct CourantModelHandle *model);

// Frees a string returned by this library. Null is a no-op.
void courant_string_free(char *s);

// Checks the Courant algebroid axioms.
enum CourantStatus courant_validate(const struct CourantModelHandle *model, char **out_report);

// Torsion residuals and curvature blocks of the three-parameter family
// connection. Rational parameters are strings like "-1/3"; null picks the
// canonical Levi-Civita value.
enum CourantStatus courant_curvature(const struct CourantModelHandle *model,
                                     const char *lambda_plus,
                                     const char *lambda_minus,
                                     const char *mu,
                                     char **out_report);

// Same as `courant_curvature` with the connection given explicitly as the
// JSON tensor format used by the CLI `--tensors` flag.
enum CourantStatus courant_curvature_with_tensors(const struct CourantModelHandle *model,
                                                  const char *connection_json,
                                                  char **out_report);

// Cross-checks closed forms against brute-force oracles on seeded random
// connections.
enum CourantStatus courant_verify(const struct CourantModelHandle *model,
                                  uint64_t seed,
                                  uint64_t trials,
                                  char **out_report);

// Describes the affine space of flat torsion-free connections.
enum CourantStatus courant_lc_space(const struct CourantModelHandle *model, char **out_report);

// Ranks and exactness of the symmetric-alternating tensor sequence.
enum CourantStatus courant_sequence(const struct CourantModelHandle *model, char **out_report);

// Betti numbers of the base algebra cohomology; `max_degree < 0` means the
// full range.
enum CourantStatus courant_ce(const struct CourantModelHandle *model,
                              int max_degree,
                              char **out_report);

// Flatness-consequence ledger for a family connection; parameters as in
// `courant_curvature`.
enum CourantStatus courant_consequences(const struct CourantModelHandle *model,
                                        const char *lambda_plus,
                                        const char *lambda_minus,
                                        const char *mu,
                                        char **out_report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus
