#ifndef HAAR_BESOV_H
#define HAAR_BESOV_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define HB_OK 0

#define HB_ERR_NULL 1

#define HB_ERR_PARAMETER 2

#define HB_ERR_CAPACITY 3

#define HB_ERR_UNSUPPORTED 4

#define HB_ERR_FORMAT 5

#define HB_ERR_IO 6

#define HB_ERR_PANIC 7

#define HB_SYSTEM_ISOTROPIC 0

#define HB_SYSTEM_TENSOR 1

// Regime codes written by `hb_classify`.
#define HB_REGIME_UNCONDITIONAL_BASIS 0

#define HB_REGIME_CONDITIONAL_BASIS 1

#define HB_REGIME_NOT_BASIS_TRIVIAL_DUAL 2

#define HB_REGIME_NOT_BASIS_UNBOUNDED_PROJECTORS 3

#define HB_REGIME_NOT_BASIS_TENSOR 4

#define HB_REGIME_DEGENERATE_SPACE 5

// Isotropic Haar coefficients.
typedef struct HbCoefficients HbCoefficients;

// Dyadic step function on the unit cube.
typedef struct HbFunction HbFunction;

// Besov parameters; `q = INFINITY` is allowed where the operation supports it.
typedef struct HbParams {
  double p;
  double q;
  double s;
  uint32_t d;
} HbParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length without the NUL,
// or 0 when there is none.
//
// # Safety
// `buf` must be valid for `len` bytes or null.
uintptr_t hb_last_error_message(char *buf, uintptr_t len);

// Function at level `m` from `len = 2^(m d)` row-major values.
//
// # Safety
// `values` must be valid for `len` reads; `out` must be writable.
int32_t hb_function_new(uint32_t d,
                        uint32_t m,
                        const double *values,
                        uintptr_t len,
                        struct HbFunction **out);

// Random function with values uniform on `[-1, 1]` (`normal = 0`) or
// standard normal, fully determined by `seed`.
//
// # Safety
// `out` must be writable.
int32_t hb_function_random(uint64_t seed,
                           uint32_t d,
                           uint32_t m,
                           int32_t normal,
                           struct HbFunction **out);

// The normalized spike `2^(m d)` on `[0, 2^-m)^d`.
//
// # Safety
// `out` must be writable.
int32_t hb_function_spike(uint32_t d, uint32_t m, struct HbFunction **out);

// # Safety
// `f` must come from this library and not be used afterwards.
void hb_function_free(struct HbFunction *f);

// Dimension, level and number of cells.
//
// # Safety
// `f` must be a live handle; out-pointers may be null.
int32_t hb_function_shape(const struct HbFunction *f, uint32_t *d, uint32_t *m, uintptr_t *len);

// Copies the values into `buf`, which must hold exactly the cell count.
//
// # Safety
// `buf` must be valid for `len` writes.
int32_t hb_function_values(const struct HbFunction *f, double *buf, uintptr_t len);

// `||f||_p` for any `p > 0`.
//
// # Safety
// `f` must be a live handle; `out` writable.
int32_t hb_lp_norm(const struct HbFunction *f, double p, double *out);

// Besov quasi-norm through best piecewise-constant approximation.
//
// # Safety
// Pointers must be valid.
int32_t hb_a_norm(const struct HbFunction *f, const struct HbParams *prm, double *out);

// Besov quasi-norm through the modulus of smoothness (finite `q`).
//
// # Safety
// Pointers must be valid.
int32_t hb_b_norm_modulus(const struct HbFunction *f, const struct HbParams *prm, double *out);

// # Safety
// `f` must be a live handle; `out` writable.
int32_t hb_analyze(const struct HbFunction *f, struct HbCoefficients **out);

// Synthesizes at level `m`, which must be at least the deepest block.
//
// # Safety
// `c` must be a live handle; `out` writable.
int32_t hb_synthesize(const struct HbCoefficients *c, uint32_t m, struct HbFunction **out);

// # Safety
// `c` must come from this library and not be used afterwards.
void hb_coefficients_free(struct HbCoefficients *c);

// Deepest block `K`.
//
// # Safety
// Pointers must be valid.
int32_t hb_coefficients_max_level(const struct HbCoefficients *c, uint32_t *out);

// Number of coefficients in block `k`.
//
// # Safety
// Pointers must be valid.
int32_t hb_coefficients_level_len(const struct HbCoefficients *c, uint32_t k, uintptr_t *out);

// Copies block `k` (storage order: parent lexicographic, then pattern) into `buf`.
//
// # Safety
// `buf` must be valid for `len` writes.
int32_t hb_coefficients_level(const struct HbCoefficients *c,
                              uint32_t k,
                              double *buf,
                              uintptr_t len);

// Weighted sequence quasi-norm of the coefficients.
//
// # Safety
// Pointers must be valid.
int32_t hb_lqlp_norm(const struct HbCoefficients *c, const struct HbParams *prm, double *out);

// Writes one of the `HB_REGIME_*` codes.
//
// # Safety
// Pointers must be valid.
int32_t hb_classify(const struct HbParams *prm,
                    int32_t system,
                    int32_t allow_degenerate,
                    int32_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HAAR_BESOV_H */
