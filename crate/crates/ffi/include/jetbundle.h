#ifndef JETBUNDLE_H
#define JETBUNDLE_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every fallible entry point.
 */
typedef enum JbStatus {
  JB_STATUS_OK = 0,
  JB_STATUS_NULL_POINTER = 1,
  JB_STATUS_INVALID_ARGUMENT = 2,
  JB_STATUS_DIMENSION_MISMATCH = 3,
  JB_STATUS_ORDER_UNAVAILABLE = 4,
  JB_STATUS_OUTSIDE_OVERLAP = 5,
  JB_STATUS_NO_OVERLAP = 6,
  JB_STATUS_UNKNOWN_FIXTURE = 7,
  JB_STATUS_SINGULAR = 8,
  JB_STATUS_CONFIG = 9,
  JB_STATUS_IO = 10,
  JB_STATUS_CHECKS_FAILED = 11,
  JB_STATUS_INTERNAL = 12,
} JbStatus;

/**
 * Output format for [`jb_run_verify`].
 */
typedef enum JbFormat {
  JB_FORMAT_TREE = 0,
  JB_FORMAT_TABLE = 1,
} JbFormat;

/**
 * Connection components of the fixture's Levi-Civita connection up to a fixed order.
 */
typedef struct JbComponents JbComponents;

/**
 * A built-in manifold: atlas plus metric.
 */
typedef struct JbFixture JbFixture;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *jb_last_error_message(void);

/**
 * Builds a fixture by name (`flat_poly`, `exp_metric_1d`, `sphere_stereo`).
 * `config_path` may be NULL; otherwise it names a `key = value` override file.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `config_path` NULL or NUL-terminated;
 * `out` a valid pointer.
 */
enum JbStatus jb_fixture_new(const char *name, const char *config_path, struct JbFixture **out);

/**
 * # Safety
 * `fixture` must be NULL or a handle from [`jb_fixture_new`] not yet freed.
 */
void jb_fixture_free(struct JbFixture *fixture);

/**
 * Manifold dimension, or 0 for a NULL handle.
 *
 * # Safety
 * `fixture` must be NULL or a live handle.
 */
size_t jb_fixture_dim(const struct JbFixture *fixture);

/**
 * Writes the chart overlapping the primary chart into `out_chart`
 * ([`JbStatus::NoOverlap`] for single-chart fixtures).
 *
 * # Safety
 * `fixture` must be a live handle and `out_chart` a valid pointer.
 */
enum JbStatus jb_fixture_partner_chart(const struct JbFixture *fixture, uint8_t *out_chart);

/**
 * Transports an order-`order` jet at `(x, xi)` in `chart` to `target`,
 * writing `dim` entries to `out_x` and `order * dim` to `out_xi`.
 *
 * # Safety
 * Buffers must hold the documented number of entries.
 */
enum JbStatus jb_natural_transition(const struct JbFixture *fixture,
                                    uint8_t chart,
                                    uint8_t target,
                                    const double *x,
                                    const double *xi,
                                    size_t dim,
                                    size_t order,
                                    double *out_x,
                                    double *out_xi);

/**
 * Induces connection components up to `order` from the fixture's metric.
 *
 * # Safety
 * `fixture` must be a live handle and `out` a valid pointer.
 */
enum JbStatus jb_components_new(const struct JbFixture *fixture,
                                size_t order,
                                struct JbComponents **out);

/**
 * # Safety
 * `components` must be NULL or a handle from [`jb_components_new`] not yet freed.
 */
void jb_components_free(struct JbComponents *components);

/**
 * Highest level held by the handle, or 0 for NULL.
 *
 * # Safety
 * `components` must be NULL or a live handle.
 */
size_t jb_components_order(const struct JbComponents *components);

/**
 * Linearizing coordinates `z` (`order * dim` entries) of the jet `(x, xi)`.
 *
 * # Safety
 * Buffers must hold the documented number of entries.
 */
enum JbStatus jb_trivialize(const struct JbComponents *components,
                            uint8_t chart,
                            const double *x,
                            const double *xi,
                            size_t dim,
                            size_t order,
                            double *out_z);

/**
 * Inverse of [`jb_trivialize`]: recovers `xi` from `(x, z)`.
 *
 * # Safety
 * Buffers must hold the documented number of entries.
 */
enum JbStatus jb_detrivialize(const struct JbComponents *components,
                              uint8_t chart,
                              const double *x,
                              const double *z,
                              size_t dim,
                              size_t order,
                              double *out_xi);

/**
 * Transition of linearized coordinates `(x, z)` from `chart` to `target`.
 *
 * # Safety
 * Buffers must hold the documented number of entries.
 */
enum JbStatus jb_linear_transition(const struct JbComponents *components,
                                   uint8_t chart,
                                   uint8_t target,
                                   const double *x,
                                   const double *z,
                                   size_t dim,
                                   size_t order,
                                   double *out_x,
                                   double *out_z);

/**
 * Lifted metric of two jets over the same base point `x`.
 *
 * # Safety
 * Buffers must hold the documented number of entries.
 */
enum JbStatus jb_metric_lift(const struct JbComponents *components,
                             uint8_t chart,
                             const double *x,
                             const double *xi1,
                             const double *xi2,
                             size_t dim,
                             size_t order,
                             double *out_value);

/**
 * Runs the verification suite and writes the rendered report (without
 * timing) to `out_report`, to be released with [`jb_string_free`].
 * A report is produced even when checks fail; the status is then
 * [`JbStatus::ChecksFailed`].
 *
 * # Safety
 * `fixture` must be NUL-terminated and `out_report` a valid pointer.
 */
enum JbStatus jb_run_verify(const char *fixture,
                            size_t order,
                            size_t samples,
                            uint64_t seed,
                            bool negative_control,
                            enum JbFormat format,
                            char **out_report);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string from this library not yet freed.
 */
void jb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JETBUNDLE_H */
