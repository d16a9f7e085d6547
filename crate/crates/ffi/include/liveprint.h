/*
 * C interface for the liveprint fingerprint liveness-detection toolkit.
 *
 * Every function returning LpStatus follows the same contract: outputs are
 * written only when the call returns LP_STATUS_OK, any pointer argument may
 * cause LP_STATUS_NULL_POINTER when NULL (unless documented as optional),
 * and a human-readable detail for the most recent failure on the current
 * thread is available from lp_last_error_message(). Handles returned
 * through `out` parameters are owned by the caller and must be released
 * with the matching lp_*_free(), which accepts NULL.
 */

#ifndef LIVEPRINT_H
#define LIVEPRINT_H

/* Generated from the liveprint-ffi Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code returned by every fallible function in this interface.
 */
typedef enum LpStatus {
  /**
   * The call succeeded and all outputs were written.
   */
  LP_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  LP_STATUS_NULL_POINTER = 1,
  /**
   * An argument was malformed: bad UTF-8, an unknown option, an invalid
   * feature-subset mask, or inconsistent sizes.
   */
  LP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The image bytes could not be decoded or have impossible dimensions.
   */
  LP_STATUS_BAD_IMAGE = 3,
  /**
   * Segmentation found no fingerprint-bearing region in the image.
   */
  LP_STATUS_EMPTY_FOREGROUND = 4,
  /**
   * The image segments but its texture is too weak to measure.
   */
  LP_STATUS_NO_USABLE_TEXTURE = 5,
  /**
   * The training data cannot support a classifier (a class is too small
   * or the pooled covariance is singular).
   */
  LP_STATUS_DEGENERATE_DATA = 6,
  /**
   * An internal invariant failed; the library state is still valid.
   */
  LP_STATUS_INTERNAL_PANIC = 7,
} LpStatus;

/**
 * Tuning parameters for segmentation, ridge analysis, and reporting.
 */
typedef struct LpConfig LpConfig;

/**
 * The ten quality measures extracted from one image.
 */
typedef struct LpFeatures LpFeatures;

/**
 * An 8-bit grayscale image.
 */
typedef struct LpImage LpImage;

/**
 * A trained two-class Gaussian discriminant over a feature subset.
 */
typedef struct LpModel LpModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying library, as a static NUL-terminated string.
 */
const char *lp_version(void);

/**
 * Static name of a status code (e.g. "LP_STATUS_OK").
 */
const char *lp_status_name(enum LpStatus status);

/**
 * Detail text for the most recent failure on the calling thread.
 *
 * The returned pointer stays valid until the next failing call on the
 * same thread; copy the string if it must outlive that.
 */
const char *lp_last_error_message(void);

/**
 * Creates a configuration with the library defaults.
 */
enum LpStatus lp_config_default(struct LpConfig **out);

/**
 * Parses a configuration from TOML text (same schema as the CLI's
 * `--config` file). Unknown keys are rejected.
 */
enum LpStatus lp_config_from_toml(const char *text, struct LpConfig **out);

/**
 * Releases a configuration handle. NULL is a no-op.
 */
void lp_config_free(struct LpConfig *cfg);

/**
 * Decodes a binary or ASCII PGM image from a byte buffer.
 */
enum LpStatus lp_image_decode_pgm(const uint8_t *bytes, size_t len, struct LpImage **out);

/**
 * Wraps a row-major 8-bit grayscale buffer of `width * height` pixels.
 * The buffer is copied; the caller keeps ownership of `pixels`.
 */
enum LpStatus lp_image_from_gray(uint32_t width,
                                 uint32_t height,
                                 const uint8_t *pixels,
                                 struct LpImage **out);

/**
 * Image width in pixels.
 */
enum LpStatus lp_image_width(const struct LpImage *img, uint32_t *out);

/**
 * Image height in pixels.
 */
enum LpStatus lp_image_height(const struct LpImage *img, uint32_t *out);

/**
 * Releases an image handle. NULL is a no-op.
 */
void lp_image_free(struct LpImage *img);

/**
 * Number of quality measures (always 10).
 */
size_t lp_feature_count(void);

/**
 * Static name of the feature at `index` in canonical order, or NULL when
 * the index is out of range.
 */
const char *lp_feature_name(size_t index);

/**
 * Extracts the ten quality measures from an image. `cfg` may be NULL to
 * use the default configuration.
 */
enum LpStatus lp_features_extract(const struct LpImage *img,
                                  const struct LpConfig *cfg,
                                  struct LpFeatures **out);

/**
 * Copies the ten feature values, in canonical order, into `out_values`
 * (which must have room for `lp_feature_count()` doubles).
 */
enum LpStatus lp_features_values(const struct LpFeatures *features, double *out_values);

/**
 * Whether the optimistic clarity score had no reliable blocks and fell
 * back to the pessimistic one. Writes 1 or 0.
 */
enum LpStatus lp_features_used_fallback(const struct LpFeatures *features, int32_t *out_flag);

/**
 * Releases a feature handle. NULL is a no-op.
 */
void lp_features_free(struct LpFeatures *features);

/**
 * Trains a two-class Gaussian discriminant on the features selected by
 * `subset_bits` (bit i = feature i in canonical order; see
 * `lp_feature_name`). Needs at least two samples per class.
 */
enum LpStatus lp_model_train(const double *feature_rows,
                             const int32_t *labels,
                             size_t n,
                             uint16_t subset_bits,
                             struct LpModel **out);

/**
 * Classifies one full 10-value feature row. Writes 1 (live) or 0 (spoof)
 * to `out_is_live` and the live-class posterior to `out_posterior`;
 * either output pointer may be NULL if that value is not needed.
 */
enum LpStatus lp_model_predict(const struct LpModel *model,
                               const double *features10,
                               int32_t *out_is_live,
                               double *out_posterior);

/**
 * Feature-subset mask the model was trained on.
 */
enum LpStatus lp_model_subset_bits(const struct LpModel *model, uint16_t *out);

/**
 * Releases a model handle. NULL is a no-op.
 */
void lp_model_free(struct LpModel *model);

/**
 * Leave-one-out error rates of one feature subset on a labeled dataset.
 * FAR is the percentage of spoofs accepted as live, FRR the percentage of
 * live samples rejected, ACE their mean; all in [0, 100]. Each output
 * pointer may be NULL if that rate is not needed. Needs at least three
 * samples per class.
 */
enum LpStatus lp_evaluate_loo(const double *feature_rows,
                              const int32_t *labels,
                              size_t n,
                              uint16_t subset_bits,
                              double *out_far,
                              double *out_frr,
                              double *out_ace);

/**
 * Evaluates all 1023 non-empty feature subsets by leave-one-out and
 * writes the winning subset mask and its ACE (ties broken toward fewer
 * features). Either output pointer may be NULL.
 */
enum LpStatus lp_select_exhaustive(const double *feature_rows,
                                   const int32_t *labels,
                                   size_t n,
                                   uint16_t *out_subset_bits,
                                   double *out_ace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIVEPRINT_H */
