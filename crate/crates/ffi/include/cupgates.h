#ifndef CUPGATES_H
#define CUPGATES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define CUPGATES_OK 0

#define CUPGATES_ERR_INPUT 1

#define CUPGATES_ERR_PRECONDITION 2

#define CUPGATES_ERR_UNSUPPORTED 3

#define CUPGATES_ERR_BUDGET 4

#define CUPGATES_ERR_OVERFLOW 5

#define CUPGATES_ERR_PARSE 6

/**
 * The output buffer is too short; the required length was still written.
 */
#define CUPGATES_ERR_BUFFER 7

#define CUPGATES_ERR_NULL -1

#define CUPGATES_ERR_UTF8 -2

#define CUPGATES_ERR_PANIC -3

/**
 * A CSS code built from a complex.
 */
typedef struct CupgatesCode CupgatesCode;

/**
 * A loaded cell complex.
 */
typedef struct CupgatesComplex CupgatesComplex;

/**
 * Message of the last failed call on this thread, empty if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cupgates_last_error(void);

/**
 * Loads a complex by shipped name (`rp2`, `cp2`, `t3`, `torus:2x3`, ...) or
 * from a JSON file path.
 *
 * # Safety
 *
 * `spec` must be a NUL-terminated string and `out` a valid pointer. On
 * success `*out` owns a handle to release with [`cupgates_complex_free`].
 */
int32_t cupgates_complex_load(const char *spec, struct CupgatesComplex **out);

/**
 * Top dimension of the complex.
 *
 * # Safety
 *
 * `complex` must be a live handle from [`cupgates_complex_load`] and `out`
 * a valid pointer.
 */
int32_t cupgates_complex_dim(const struct CupgatesComplex *complex, uintptr_t *out);

/**
 * Betti numbers mod the prime `p`, written into `buf` (`len` entries).
 * `*written` receives dim + 1; if that exceeds `len` the call fails with
 * `CUPGATES_ERR_BUFFER` and writes nothing else.
 *
 * # Safety
 *
 * `complex` must be a live handle, `written` a valid pointer and `buf`
 * valid for `len` writes (it may be null when `len` is 0).
 */
int32_t cupgates_betti_numbers(const struct CupgatesComplex *complex,
                               uint64_t p,
                               uint64_t *buf,
                               uintptr_t len,
                               uintptr_t *written);

/**
 * Releases a complex. Null is ignored.
 *
 * # Safety
 *
 * `complex` must be null or a handle not yet freed. Codes built from it
 * remain valid.
 */
void cupgates_complex_free(struct CupgatesComplex *complex);

/**
 * Builds the Z_`modulus` code with qudits on `degree`-cells, `copies` times.
 *
 * # Safety
 *
 * `complex` must be a live handle and `out` a valid pointer. On success
 * `*out` owns a handle to release with [`cupgates_code_free`].
 */
int32_t cupgates_code_new(const struct CupgatesComplex *complex,
                          uintptr_t degree,
                          uint64_t modulus,
                          uintptr_t copies,
                          struct CupgatesCode **out);

/**
 * Number of physical qudits.
 *
 * # Safety
 *
 * `code` must be a live handle and `out` a valid pointer.
 */
int32_t cupgates_code_num_qudits(const struct CupgatesCode *code, uintptr_t *out);

/**
 * Logical dimension of the code. Fails with `CUPGATES_ERR_OVERFLOW` when it
 * does not fit in 64 bits.
 *
 * # Safety
 *
 * `code` must be a live handle and `out` a valid pointer.
 */
int32_t cupgates_code_logical_dimension(const struct CupgatesCode *code, uint64_t *out);

/**
 * Synthesizes `expr` on the code, checks that the circuit commutes with
 * every X-check and, if it does, extracts its logical action.
 *
 * `*commutes` is set to 1 or 0. On commutation `*description` receives a
 * newly allocated string (release with [`cupgates_string_free`]); otherwise
 * it is set to null.
 *
 * # Safety
 *
 * `code` must be a live handle, `expr` a NUL-terminated string and
 * `commutes` and `description` valid pointers.
 */
int32_t cupgates_verify_expression(const struct CupgatesCode *code,
                                   const char *expr,
                                   uint64_t seed,
                                   int32_t *commutes,
                                   char **description);

/**
 * Runs a shipped scenario by name; `*passed` is set to 1 or 0.
 *
 * # Safety
 *
 * `name` must be a NUL-terminated string and `passed` a valid pointer.
 */
int32_t cupgates_run_scenario(const char *name, int32_t *passed);

/**
 * Releases a code. Null is ignored.
 *
 * # Safety
 *
 * `code` must be null or a handle not yet freed.
 */
void cupgates_code_free(struct CupgatesCode *code);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 *
 * `s` must be null or a string from this library not yet freed.
 */
void cupgates_string_free(char *s);

#endif  /* CUPGATES_H */
