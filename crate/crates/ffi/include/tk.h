/*
 * C interface to the tk twisted K-theory engine.
 *
 * See tk.h usage notes in the repository README. Strings returned by this
 * library are owned by the caller and must be released with tk_string_free,
 * except tk_version, which returns a static string.
 */

#ifndef TK_H
#define TK_H

/* Generated by cbindgen from the tk-ffi crate. Do not edit by hand; run the header test with TK_BLESS_HEADER=1 to regenerate. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Resolution mode selector for `tk_tor_json`: resolve by free Λ-modules.
 */
#define TK_TOR_MODE_FREE 0

/**
 * Resolution mode selector for `tk_tor_json`: resolve by relatively
 * projective extended modules.
 */
#define TK_TOR_MODE_RELATIVE 1

/**
 * Largest homological degree accepted by `tk_tor_json`.
 */
#define TK_TOR_MAX_DEGREE 64

/**
 * Result code returned by every fallible entry point.
 */
typedef enum TkStatus {
  /**
   * Success; out-parameters are populated.
   */
  TK_STATUS_OK = 0,
  /**
   * A required pointer was NULL or a scalar argument was out of range.
   */
  TK_STATUS_INVALID_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  TK_STATUS_INVALID_UTF8 = 2,
  /**
   * The input text failed to parse or validate.
   */
  TK_STATUS_PARSE_ERROR = 3,
  /**
   * The computation itself reported an error (e.g. an internal
   * consistency cross-check failed).
   */
  TK_STATUS_COMPUTE_ERROR = 4,
  /**
   * A panic was caught at the ABI boundary; state is unchanged.
   */
  TK_STATUS_INTERNAL = 5,
} TkStatus;

/**
 * Opaque handle to a validated finitely presented module over the
 * truncated β-basis ring.
 */
typedef struct TkPresentation TkPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *tk_version(void);

/**
 * Message describing the most recent failure on the calling thread, or an
 * empty string if the last call succeeded. The caller owns the returned
 * string and must release it with `tk_string_free`.
 */
char *tk_last_error(void);

/**
 * Release a string previously returned through an out-parameter or by
 * `tk_last_error`. NULL is accepted and ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library that has not
 * already been freed.
 */
void tk_string_free(char *s);

/**
 * Parse and validate a presentation from its JSON document. On success,
 * writes a handle that the caller must release with `tk_presentation_free`.
 *
 * # Safety
 * `json` must be NULL or point to a NUL-terminated string; `out` must be
 * NULL or point to writable memory for one pointer.
 */
enum TkStatus tk_presentation_parse(const char *json, struct TkPresentation **out);

/**
 * Release a presentation handle. NULL is accepted and ignored.
 *
 * # Safety
 * `handle` must be NULL or a pointer obtained from `tk_presentation_parse`
 * that has not already been freed.
 */
void tk_presentation_free(struct TkPresentation *handle);

/**
 * Number of generators in the presentation.
 *
 * # Safety
 * `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
 * `out` must be NULL or writable.
 */
enum TkStatus tk_presentation_generators(const struct TkPresentation *handle, size_t *out);

/**
 * Truncation level D of the presentation's coefficient ring.
 *
 * # Safety
 * `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
 * `out` must be NULL or writable.
 */
enum TkStatus tk_presentation_truncation(const struct TkPresentation *handle, uint32_t *out);

/**
 * Compute the twisted K-groups of the presented module as a JSON document
 * with per-parity free ranks and invariant factors. The caller owns the
 * returned string and must release it with `tk_string_free`.
 *
 * # Safety
 * `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
 * `out_json` must be NULL or writable.
 */
enum TkStatus tk_twisted_k_json(const struct TkPresentation *handle, char **out_json);

/**
 * Compute Tor_s for s = 0, …, `s_max` of the presented module against the
 * coefficient module of the multiplicative formal group law, in the chosen
 * resolution mode (`TK_TOR_MODE_FREE` or `TK_TOR_MODE_RELATIVE`). Writes a
 * JSON document; the caller owns it and must release it with
 * `tk_string_free`.
 *
 * # Safety
 * `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
 * `out_json` must be NULL or writable.
 */
enum TkStatus tk_tor_json(const struct TkPresentation *handle,
                          uint32_t s_max,
                          int32_t mode,
                          char **out_json);

/**
 * Decide whether a Laurent expression in u and v lies in the integral
 * bialgebra of cooperations. Writes 1 or 0 through `out_is_member`.
 *
 * # Safety
 * `expr` must be NULL or point to a NUL-terminated string; `out_is_member`
 * must be NULL or writable.
 */
enum TkStatus tk_kk_is_member(const char *expr, bool *out_is_member);

/**
 * Run the built-in consistency checks. `deep` enables the slower corpus.
 * Returns `TK_STATUS_OK` when every check passes and
 * `TK_STATUS_COMPUTE_ERROR` (with a message naming the first failure)
 * otherwise.
 */
enum TkStatus tk_self_test(bool deep);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TK_H */
