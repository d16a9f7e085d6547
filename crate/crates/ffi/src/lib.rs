//! C ABI for the liveprint fingerprint liveness-detection toolkit.
//!
//! Conventions shared by every entry point:
//! - Functions returning [`LpStatus`] write their outputs only on
//!   `LP_STATUS_OK` and never touch them on failure.
//! - NULL handles or output pointers yield `LP_STATUS_NULL_POINTER`;
//!   arguments documented as optional accept NULL.
//! - A textual detail for the most recent failure on the current thread is
//!   available from [`lp_last_error_message`].
//! - Handles returned through `out` parameters are caller-owned; release
//!   them with the matching `lp_*_free`, each of which accepts NULL.
//! - Panics never unwind across the boundary; they are reported as
//!   `LP_STATUS_INTERNAL_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use liveprint::classify::{
    exhaustive_select, fit_lda, loo_evaluate, predict, ClassifyError, GaussianClassModel, Label,
    LabeledSample, SubsetMask,
};
use liveprint::config::ToolConfig;
use liveprint::features::{extract_all, FeatureError, FeatureVector, FEATURE_NAMES};
use liveprint::image::GrayImage;
use liveprint::segmentation::SegmentationError;

/// Result code returned by every fallible function in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types)]
pub enum LpStatus {
    /// The call succeeded and all outputs were written.
    LP_STATUS_OK = 0,
    /// A required pointer argument was NULL.
    LP_STATUS_NULL_POINTER = 1,
    /// An argument was malformed: bad UTF-8, an unknown option, an invalid
    /// feature-subset mask, or inconsistent sizes.
    LP_STATUS_INVALID_ARGUMENT = 2,
    /// The image bytes could not be decoded or have impossible dimensions.
    LP_STATUS_BAD_IMAGE = 3,
    /// Segmentation found no fingerprint-bearing region in the image.
    LP_STATUS_EMPTY_FOREGROUND = 4,
    /// The image segments but its texture is too weak to measure.
    LP_STATUS_NO_USABLE_TEXTURE = 5,
    /// The training data cannot support a classifier (a class is too small
    /// or the pooled covariance is singular).
    LP_STATUS_DEGENERATE_DATA = 6,
    /// An internal invariant failed; the library state is still valid.
    LP_STATUS_INTERNAL_PANIC = 7,
}

use LpStatus::*;

/// Tuning parameters for segmentation, ridge analysis, and reporting.
pub struct LpConfig(ToolConfig);

/// An 8-bit grayscale image.
pub struct LpImage(GrayImage);

/// The ten quality measures extracted from one image.
pub struct LpFeatures {
    values: [f64; 10],
    used_fallback: bool,
}

/// A trained two-class Gaussian discriminant over a feature subset.
pub struct LpModel(GaussianClassModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: LpStatus, msg: impl Into<Vec<u8>>) -> LpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> LpStatus) -> LpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic; see stderr for details");
        LP_STATUS_INTERNAL_PANIC
    })
}

fn feature_status(e: &FeatureError) -> LpStatus {
    match e {
        FeatureError::NoReliableBlocks => LP_STATUS_NO_USABLE_TEXTURE,
        FeatureError::Segmentation(SegmentationError::EmptyForeground) => {
            LP_STATUS_EMPTY_FOREGROUND
        }
        FeatureError::Segmentation(SegmentationError::InvalidConfig(_)) => {
            LP_STATUS_INVALID_ARGUMENT
        }
        FeatureError::Segmentation(SegmentationError::Image(_)) | FeatureError::Image(_) => {
            LP_STATUS_BAD_IMAGE
        }
        FeatureError::Ridge(_) => LP_STATUS_NO_USABLE_TEXTURE,
    }
}

fn classify_status(e: &ClassifyError) -> LpStatus {
    match e {
        ClassifyError::DegenerateTraining { .. } | ClassifyError::ZeroVariance => {
            LP_STATUS_DEGENERATE_DATA
        }
        _ => LP_STATUS_INVALID_ARGUMENT,
    }
}

/// Writes a freshly boxed value through `out`.
///
/// # Safety
/// `out` must be a valid, non-NULL pointer to writable memory.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> LpStatus {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    LP_STATUS_OK
}

/// Version of the underlying library, as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name of a status code (e.g. "LP_STATUS_OK").
#[no_mangle]
pub extern "C" fn lp_status_name(status: LpStatus) -> *const c_char {
    let name: &'static str = match status {
        LP_STATUS_OK => "LP_STATUS_OK\0",
        LP_STATUS_NULL_POINTER => "LP_STATUS_NULL_POINTER\0",
        LP_STATUS_INVALID_ARGUMENT => "LP_STATUS_INVALID_ARGUMENT\0",
        LP_STATUS_BAD_IMAGE => "LP_STATUS_BAD_IMAGE\0",
        LP_STATUS_EMPTY_FOREGROUND => "LP_STATUS_EMPTY_FOREGROUND\0",
        LP_STATUS_NO_USABLE_TEXTURE => "LP_STATUS_NO_USABLE_TEXTURE\0",
        LP_STATUS_DEGENERATE_DATA => "LP_STATUS_DEGENERATE_DATA\0",
        LP_STATUS_INTERNAL_PANIC => "LP_STATUS_INTERNAL_PANIC\0",
    };
    name.as_ptr() as *const c_char
}

/// Detail text for the most recent failure on the calling thread.
///
/// The returned pointer stays valid until the next failing call on the
/// same thread; copy the string if it must outlive that.
#[no_mangle]
pub extern "C" fn lp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a configuration with the library defaults.
#[no_mangle]
pub extern "C" fn lp_config_default(out: *mut *mut LpConfig) -> LpStatus {
    guard(|| {
        if out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "out is NULL");
        }
        unsafe { emit(out, LpConfig(ToolConfig::default())) }
    })
}

/// Parses a configuration from TOML text (same schema as the CLI's
/// `--config` file). Unknown keys are rejected.
#[no_mangle]
pub extern "C" fn lp_config_from_toml(text: *const c_char, out: *mut *mut LpConfig) -> LpStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "text or out is NULL");
        }
        let text = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(e) => return fail(LP_STATUS_INVALID_ARGUMENT, format!("config text: {e}")),
        };
        match ToolConfig::from_toml(text) {
            Ok(cfg) => unsafe { emit(out, LpConfig(cfg)) },
            Err(e) => fail(LP_STATUS_INVALID_ARGUMENT, e.to_string()),
        }
    })
}

/// Releases a configuration handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn lp_config_free(cfg: *mut LpConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Decodes a binary or ASCII PGM image from a byte buffer.
#[no_mangle]
pub extern "C" fn lp_image_decode_pgm(
    bytes: *const u8,
    len: usize,
    out: *mut *mut LpImage,
) -> LpStatus {
    guard(|| {
        if bytes.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "bytes or out is NULL");
        }
        let data = unsafe { std::slice::from_raw_parts(bytes, len) };
        match liveprint::image::load_pgm(data) {
            Ok(img) => unsafe { emit(out, LpImage(img)) },
            Err(e) => fail(LP_STATUS_BAD_IMAGE, e.to_string()),
        }
    })
}

/// Wraps a row-major 8-bit grayscale buffer of `width * height` pixels.
/// The buffer is copied; the caller keeps ownership of `pixels`.
#[no_mangle]
pub extern "C" fn lp_image_from_gray(
    width: u32,
    height: u32,
    pixels: *const u8,
    out: *mut *mut LpImage,
) -> LpStatus {
    guard(|| {
        if pixels.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "pixels or out is NULL");
        }
        let n = width as usize * height as usize;
        let data = unsafe { std::slice::from_raw_parts(pixels, n) }.to_vec();
        match GrayImage::from_pixels(width, height, data) {
            Ok(img) => unsafe { emit(out, LpImage(img)) },
            Err(e) => fail(LP_STATUS_BAD_IMAGE, e.to_string()),
        }
    })
}

/// Image width in pixels.
#[no_mangle]
pub extern "C" fn lp_image_width(img: *const LpImage, out: *mut u32) -> LpStatus {
    guard(|| {
        if img.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "img or out is NULL");
        }
        unsafe { *out = (*img).0.width() };
        LP_STATUS_OK
    })
}

/// Image height in pixels.
#[no_mangle]
pub extern "C" fn lp_image_height(img: *const LpImage, out: *mut u32) -> LpStatus {
    guard(|| {
        if img.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "img or out is NULL");
        }
        unsafe { *out = (*img).0.height() };
        LP_STATUS_OK
    })
}

/// Releases an image handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn lp_image_free(img: *mut LpImage) {
    if !img.is_null() {
        drop(unsafe { Box::from_raw(img) });
    }
}

/// Number of quality measures (always 10).
#[no_mangle]
pub extern "C" fn lp_feature_count() -> usize {
    FEATURE_NAMES.len()
}

/// Static name of the feature at `index` in canonical order, or NULL when
/// the index is out of range.
#[no_mangle]
pub extern "C" fn lp_feature_name(index: usize) -> *const c_char {
    const NAMES: [&str; 10] = [
        "Q_OCL\0", "Q_E\0", "Q_LOQ\0", "Q_COF\0", "Q_MEAN\0", "Q_STD\0", "Q_LCS1\0", "Q_LCS2\0",
        "Q_A\0", "Q_VAR\0",
    ];
    match NAMES.get(index) {
        Some(name) => name.as_ptr() as *const c_char,
        None => std::ptr::null(),
    }
}

/// Extracts the ten quality measures from an image. `cfg` may be NULL to
/// use the default configuration.
#[no_mangle]
pub extern "C" fn lp_features_extract(
    img: *const LpImage,
    cfg: *const LpConfig,
    out: *mut *mut LpFeatures,
) -> LpStatus {
    guard(|| {
        if img.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "img or out is NULL");
        }
        let default_cfg;
        let cfg = if cfg.is_null() {
            default_cfg = ToolConfig::default();
            &default_cfg
        } else {
            unsafe { &(*cfg).0 }
        };
        match extract_all(unsafe { &(*img).0 }, cfg) {
            Ok(ex) => unsafe {
                emit(
                    out,
                    LpFeatures {
                        values: ex.features.as_array(),
                        used_fallback: ex.lcs1_fallback,
                    },
                )
            },
            Err(e) => fail(feature_status(&e), e.to_string()),
        }
    })
}

/// Copies the ten feature values, in canonical order, into `out_values`
/// (which must have room for `lp_feature_count()` doubles).
#[no_mangle]
pub extern "C" fn lp_features_values(
    features: *const LpFeatures,
    out_values: *mut f64,
) -> LpStatus {
    guard(|| {
        if features.is_null() || out_values.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "features or out_values is NULL");
        }
        let values = unsafe { &(*features).values };
        unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), out_values, values.len()) };
        LP_STATUS_OK
    })
}

/// Whether the optimistic clarity score had no reliable blocks and fell
/// back to the pessimistic one. Writes 1 or 0.
#[no_mangle]
pub extern "C" fn lp_features_used_fallback(
    features: *const LpFeatures,
    out_flag: *mut i32,
) -> LpStatus {
    guard(|| {
        if features.is_null() || out_flag.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "features or out_flag is NULL");
        }
        unsafe { *out_flag = i32::from((*features).used_fallback) };
        LP_STATUS_OK
    })
}

/// Releases a feature handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn lp_features_free(features: *mut LpFeatures) {
    if !features.is_null() {
        drop(unsafe { Box::from_raw(features) });
    }
}

/// Builds labeled samples from parallel arrays: `feature_rows` holds
/// `n * 10` doubles row-major, `labels[i]` is 1 for a live sample and 0
/// for a spoof.
fn samples_from_arrays(
    feature_rows: *const f64,
    labels: *const i32,
    n: usize,
) -> Result<Vec<LabeledSample>, LpStatus> {
    if n == 0 || n > usize::MAX / 10 {
        set_error(format!("sample count {n} out of range"));
        return Err(LP_STATUS_INVALID_ARGUMENT);
    }
    let rows = unsafe { std::slice::from_raw_parts(feature_rows, n * 10) };
    let labels = unsafe { std::slice::from_raw_parts(labels, n) };
    let mut samples = Vec::with_capacity(n);
    for (i, (chunk, &lab)) in rows.chunks_exact(10).zip(labels).enumerate() {
        let label = match lab {
            1 => Label::Real,
            0 => Label::Fake,
            other => {
                set_error(format!("label {other} at row {i}: must be 0 (spoof) or 1 (live)"));
                return Err(LP_STATUS_INVALID_ARGUMENT);
            }
        };
        let mut values = [0.0f64; 10];
        values.copy_from_slice(chunk);
        samples.push(LabeledSample {
            id: i.to_string(),
            sensor: "c-api".into(),
            label,
            material: None,
            features: FeatureVector::from_array(values),
        });
    }
    Ok(samples)
}

fn subset_from_bits(bits: u16) -> Result<SubsetMask, LpStatus> {
    SubsetMask::from_bits(bits).map_err(|e| {
        set_error(e.to_string());
        LP_STATUS_INVALID_ARGUMENT
    })
}

/// Trains a two-class Gaussian discriminant on the features selected by
/// `subset_bits` (bit i = feature i in canonical order; see
/// `lp_feature_name`). Needs at least two samples per class.
#[no_mangle]
pub extern "C" fn lp_model_train(
    feature_rows: *const f64,
    labels: *const i32,
    n: usize,
    subset_bits: u16,
    out: *mut *mut LpModel,
) -> LpStatus {
    guard(|| {
        if feature_rows.is_null() || labels.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "feature_rows, labels, or out is NULL");
        }
        let subset = match subset_from_bits(subset_bits) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let samples = match samples_from_arrays(feature_rows, labels, n) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match fit_lda(&samples, subset) {
            Ok(model) => unsafe { emit(out, LpModel(model)) },
            Err(e) => fail(classify_status(&e), e.to_string()),
        }
    })
}

/// Classifies one full 10-value feature row. Writes 1 (live) or 0 (spoof)
/// to `out_is_live` and the live-class posterior to `out_posterior`;
/// either output pointer may be NULL if that value is not needed.
#[no_mangle]
pub extern "C" fn lp_model_predict(
    model: *const LpModel,
    features10: *const f64,
    out_is_live: *mut i32,
    out_posterior: *mut f64,
) -> LpStatus {
    guard(|| {
        if model.is_null() || features10.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "model or features10 is NULL");
        }
        let mut values = [0.0f64; 10];
        values.copy_from_slice(unsafe { std::slice::from_raw_parts(features10, 10) });
        match predict(unsafe { &(*model).0 }, &FeatureVector::from_array(values)) {
            Ok((label, posterior)) => {
                if !out_is_live.is_null() {
                    unsafe { *out_is_live = i32::from(label == Label::Real) };
                }
                if !out_posterior.is_null() {
                    unsafe { *out_posterior = posterior };
                }
                LP_STATUS_OK
            }
            Err(e) => fail(classify_status(&e), e.to_string()),
        }
    })
}

/// Feature-subset mask the model was trained on.
#[no_mangle]
pub extern "C" fn lp_model_subset_bits(model: *const LpModel, out: *mut u16) -> LpStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "model or out is NULL");
        }
        unsafe { *out = (*model).0.subset.bits() };
        LP_STATUS_OK
    })
}

/// Releases a model handle. NULL is a no-op.
#[no_mangle]
pub extern "C" fn lp_model_free(model: *mut LpModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Leave-one-out error rates of one feature subset on a labeled dataset.
/// FAR is the percentage of spoofs accepted as live, FRR the percentage of
/// live samples rejected, ACE their mean; all in [0, 100]. Each output
/// pointer may be NULL if that rate is not needed. Needs at least three
/// samples per class.
#[no_mangle]
pub extern "C" fn lp_evaluate_loo(
    feature_rows: *const f64,
    labels: *const i32,
    n: usize,
    subset_bits: u16,
    out_far: *mut f64,
    out_frr: *mut f64,
    out_ace: *mut f64,
) -> LpStatus {
    guard(|| {
        if feature_rows.is_null() || labels.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "feature_rows or labels is NULL");
        }
        let subset = match subset_from_bits(subset_bits) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let samples = match samples_from_arrays(feature_rows, labels, n) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match loo_evaluate(&samples, subset) {
            Ok(result) => {
                if !out_far.is_null() {
                    unsafe { *out_far = result.far };
                }
                if !out_frr.is_null() {
                    unsafe { *out_frr = result.frr };
                }
                if !out_ace.is_null() {
                    unsafe { *out_ace = result.ace };
                }
                LP_STATUS_OK
            }
            Err(e) => fail(classify_status(&e), e.to_string()),
        }
    })
}

/// Evaluates all 1023 non-empty feature subsets by leave-one-out and
/// writes the winning subset mask and its ACE (ties broken toward fewer
/// features). Either output pointer may be NULL.
#[no_mangle]
pub extern "C" fn lp_select_exhaustive(
    feature_rows: *const f64,
    labels: *const i32,
    n: usize,
    out_subset_bits: *mut u16,
    out_ace: *mut f64,
) -> LpStatus {
    guard(|| {
        if feature_rows.is_null() || labels.is_null() {
            return fail(LP_STATUS_NULL_POINTER, "feature_rows or labels is NULL");
        }
        let samples = match samples_from_arrays(feature_rows, labels, n) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match exhaustive_select(&samples) {
            Ok(report) => {
                if !out_subset_bits.is_null() {
                    unsafe { *out_subset_bits = report.best.subset.bits() };
                }
                if !out_ace.is_null() {
                    unsafe { *out_ace = report.best.result.ace };
                }
                LP_STATUS_OK
            }
            Err(e) => fail(classify_status(&e), e.to_string()),
        }
    })
}
