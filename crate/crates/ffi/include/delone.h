#ifndef DELONE_H
#define DELONE_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DeloneClass {
  DELONE_CLASS_PISOT = 0,
  DELONE_CLASS_SALEM = 1,
  DELONE_CLASS_PERRON = 2,
  DELONE_CLASS_LIND = 3,
  DELONE_CLASS_UNCLASSIFIED = 4,
} DeloneClass;

typedef enum DeloneStatus {
  DELONE_STATUS_OK = 0,
  DELONE_STATUS_NULL_POINTER = 1,
  DELONE_STATUS_INVALID_UTF8 = 2,
  DELONE_STATUS_PARSE_ERROR = 3,
  DELONE_STATUS_INVALID_ARGUMENT = 4,
  DELONE_STATUS_DATA_ERROR = 5,
  DELONE_STATUS_BUFFER_TOO_SMALL = 6,
  DELONE_STATUS_PANIC = 7,
} DeloneStatus;

/**
 * A finite colored point set.
 */
typedef struct DelonePointSet DelonePointSet;

/**
 * A parsed system description.
 */
typedef struct DeloneSpec DeloneSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message of this thread into `buf` (NUL-terminated, truncated to
 * `len`). Returns the full message length without the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t delone_last_error(char *buf, size_t len);

/**
 * Classify the largest real root of a monic irreducible polynomial such as `x^2-x-1`.
 * `max_conjugate_modulus` receives 0 for degree one.
 *
 * # Safety
 * `poly` must be a NUL-terminated string; the out pointers must be valid.
 */
enum DeloneStatus delone_classify(const char *poly,
                                  enum DeloneClass *class_out,
                                  double *max_conjugate_modulus);

/**
 * Parse a system description.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DeloneStatus delone_spec_parse(const char *source, struct DeloneSpec **out);

/**
 * # Safety
 * `spec` must be null or a handle from [`delone_spec_parse`] not yet freed.
 */
void delone_spec_free(struct DeloneSpec *spec);

/**
 * Physical dimension of the described system.
 *
 * # Safety
 * `spec` must be a live handle and `dim` a valid pointer.
 */
enum DeloneStatus delone_spec_dimension(const struct DeloneSpec *spec, size_t *dim);

/**
 * Check the substitution of a spec on its cluster (or {0}) and the cube [lo, hi]^d. `pf_gap` receives
 * |λ(S) − |det Q||; `ok` is 1 when expansion, primitivity, the eigenvalue identity and
 * disjointness all hold.
 *
 * # Safety
 * `spec` must be a live handle; the out pointers must be valid.
 */
enum DeloneStatus delone_spec_validate(const struct DeloneSpec *spec,
                                       double lo,
                                       double hi,
                                       double *pf_gap,
                                       int32_t *ok);

/**
 * Generate the spec's point set on the cube [lo, hi]^d.
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum DeloneStatus delone_spec_generate(const struct DeloneSpec *spec,
                                       double lo,
                                       double hi,
                                       struct DelonePointSet **out);

/**
 * # Safety
 * `set` must be null or a handle from [`delone_spec_generate`] not yet freed.
 */
void delone_pointset_free(struct DelonePointSet *set);

/**
 * Number of (color, point) entries and the physical dimension.
 *
 * # Safety
 * `set` must be a live handle; the out pointers must be valid.
 */
enum DeloneStatus delone_pointset_shape(const struct DelonePointSet *set, size_t *len, size_t *dim);

/**
 * Positions (row-major, `len × dim`) and color indices, ordered color by color. `cap` is the
 * number of entries the buffers can hold; either buffer may be null.
 *
 * # Safety
 * Non-null buffers must hold `cap * dim` doubles and `cap` colors respectively.
 */
enum DeloneStatus delone_pointset_points(const struct DelonePointSet *set,
                                         double *positions,
                                         uint32_t *colors,
                                         size_t cap);

/**
 * Render as SVG (`format = 0`) or CSV (`format = 1`) into a string released with
 * [`delone_string_free`].
 *
 * # Safety
 * `set` must be a live handle and `out` a valid pointer.
 */
enum DeloneStatus delone_pointset_export(const struct DelonePointSet *set,
                                         int32_t format,
                                         char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void delone_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DELONE_H */
