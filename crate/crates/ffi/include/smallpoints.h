#ifndef SMALLPOINTS_H
#define SMALLPOINTS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. The first six values match the command-line exit codes.
typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_PARSE = 1,
  SP_STATUS_SEARCH_SPACE = 2,
  SP_STATUS_OFF_CURVE = 3,
  SP_STATUS_INCONCLUSIVE = 4,
  SP_STATUS_VIOLATION = 5,
  SP_STATUS_NULL_ARGUMENT = 10,
  SP_STATUS_INVALID_UTF8 = 11,
  SP_STATUS_PANIC = 12,
} SpStatus;

// Kind of an N-function value.
typedef enum SpNKind {
  // `N = value`.
  SP_N_KIND_FINITE = 0,
  // The orbit is finite and stays below the threshold: `N` is infinite.
  SP_N_KIND_PREPERIODIC = 1,
  // No exceedance within `value` steps.
  SP_N_KIND_CAP_EXCEEDED = 2,
  // Undecided at step `value` because of precision.
  SP_N_KIND_INCONCLUSIVE = 3,
} SpNKind;

// Opaque algebraic number.
typedef struct SpAlgebraic SpAlgebraic;

// Opaque elliptic curve `y^2 = x^3 + a x + b` over `Q`.
typedef struct SpCurve SpCurve;

// Opaque heighted dynamical system.
typedef struct SpSystem SpSystem;

// A height with its certified error bound.
typedef struct SpHeight {
  double value;
  double error;
} SpHeight;

// An N-function value: `kind` with its step count.
typedef struct SpNValue {
  enum SpNKind kind;
  uint32_t value;
} SpNValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into the library on the same thread.
const char *sp_last_error(void);

// Library version as a static string.
const char *sp_version(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void sp_string_free(char *s);

// Builds the rational number `text` (`"p/q"` or an integer).
//
// # Safety
// `text` must be a valid C string and `out` a valid pointer.
enum SpStatus sp_algebraic_from_rational(const char *text, struct SpAlgebraic **out);

// Builds the root number `root_index` of the irreducible polynomial with
// integer coefficients `coeffs[0] + coeffs[1] x + ... + coeffs[len-1] x^(len-1)`.
// Roots are ordered as in the command line's `orbit` listing.
//
// # Safety
// `coeffs` must point to `len` integers and `out` must be a valid pointer.
enum SpStatus sp_algebraic_from_minpoly(const int64_t *coeffs,
                                        size_t len,
                                        size_t root_index,
                                        struct SpAlgebraic **out);

// Releases an algebraic number.
//
// # Safety
// `a` must be null or a handle from this library, not yet freed.
void sp_algebraic_free(struct SpAlgebraic *a);

// Degree of the number over `Q`.
//
// # Safety
// `a` must be a valid handle and `out` a valid pointer.
enum SpStatus sp_algebraic_degree(const struct SpAlgebraic *a, size_t *out);

// Absolute logarithmic Weil height with its error bound.
//
// # Safety
// `a` must be a valid handle and `out` a valid pointer.
enum SpStatus sp_algebraic_weil_height(const struct SpAlgebraic *a, struct SpHeight *out);

// The minimal polynomial as a JSON array of coefficient strings, constant
// term first. Free the result with [`sp_string_free`].
//
// # Safety
// `a` must be a valid handle and `out` a valid pointer.
enum SpStatus sp_algebraic_minpoly_json(const struct SpAlgebraic *a, char **out);

// Parses a curve from JSON, `{"a": "0", "b": "-2"}`.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum SpStatus sp_curve_from_json(const char *json, struct SpCurve **out);

// Releases a curve.
//
// # Safety
// `e` must be null or a handle from this library, not yet freed.
void sp_curve_free(struct SpCurve *e);

// Canonical height of a point given as JSON (`{"x": "3", "y": "5"}` or
// `"O"`), computed to within `tol`.
//
// # Safety
// `e` must be a valid handle, `point_json` a valid C string and `out` a
// valid pointer.
enum SpStatus sp_curve_canonical_height(const struct SpCurve *e,
                                        const char *point_json,
                                        double tol,
                                        struct SpHeight *out);

// Parses a heighted system from JSON in the command-line format.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum SpStatus sp_system_from_json(const char *json, struct SpSystem **out);

// Releases a system.
//
// # Safety
// `s` must be null or a handle from this library, not yet freed.
void sp_system_free(struct SpSystem *s);

// N-function of `sys` at a point given as JSON (`{"ec": ..., "torus": [...]}`)
// or as a rational, iterating at most `cap` steps.
//
// # Safety
// `sys` must be a valid handle, `point` a valid C string and `out` a valid
// pointer.
enum SpStatus sp_system_nfunc(const struct SpSystem *sys,
                              const char *point,
                              uint32_t cap,
                              struct SpNValue *out);

// Runs the command line with `argv[0..argc]` (without the program name).
// Stores the exit code in `exit_code` and the standard output or error text
// in `output` (free it with [`sp_string_free`]). Returns `Ok` whenever the
// command ran, whatever its exit code.
//
// # Safety
// `argv` must point to `argc` valid C strings; `exit_code` and `output`
// must be valid pointers.
enum SpStatus sp_run(const char *const *argv, size_t argc, int32_t *exit_code, char **output);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMALLPOINTS_H */
