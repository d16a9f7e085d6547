//! The ten image-quality measures computed from one segmented fingerprint.
//!
//! Every measure lands in [0,1] with higher = better quality. The fixed
//! feature order everywhere in the toolkit (vectors, CSV columns, subset
//! masks) is: Q_OCL, Q_E, Q_LOQ, Q_COF, Q_MEAN, Q_STD, Q_LCS1, Q_LCS2,
//! Q_A, Q_VAR.
//!
//! All feature operations share one signature over the segmented artifacts
//! (image, foreground mask, orientation field, config); measures that ignore
//! one of the inputs still accept it so callers can treat the ten uniformly.

use crate::config::ToolConfig;
use crate::image::{BlockGrid, GrayImage, ImageError};
use crate::ridge::{
    compute_gradients, gradient_covariance_block, orientation_field_from, oriented_window,
    fit_from_window, power_spectrum_profile, GradientField, OrientationField, RidgeError,
    SinusoidModel, SinusoidParams,
};
use crate::segmentation::{segment, SegmentationError, SegmentationMask};
use thiserror::Error;

/// Feature names in canonical order.
pub const FEATURE_NAMES: [&str; 10] = [
    "Q_OCL", "Q_E", "Q_LOQ", "Q_COF", "Q_MEAN", "Q_STD", "Q_LCS1", "Q_LCS2", "Q_A", "Q_VAR",
];

/// The ten quality measures of one image, each in [0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub q_ocl: f64,
    pub q_e: f64,
    pub q_loq: f64,
    pub q_cof: f64,
    pub q_mean: f64,
    pub q_std: f64,
    pub q_lcs1: f64,
    pub q_lcs2: f64,
    pub q_a: f64,
    pub q_var: f64,
}

impl FeatureVector {
    /// Values in canonical order.
    pub fn as_array(&self) -> [f64; 10] {
        [
            self.q_ocl, self.q_e, self.q_loq, self.q_cof, self.q_mean, self.q_std, self.q_lcs1,
            self.q_lcs2, self.q_a, self.q_var,
        ]
    }

    pub fn from_array(v: [f64; 10]) -> Self {
        Self {
            q_ocl: v[0],
            q_e: v[1],
            q_loq: v[2],
            q_cof: v[3],
            q_mean: v[4],
            q_std: v[5],
            q_lcs1: v[6],
            q_lcs2: v[7],
            q_a: v[8],
            q_var: v[9],
        }
    }
}

/// Ridge/valley separability of one block window.
#[derive(Debug, Clone, Copy)]
pub struct BlockClarity {
    /// Fraction of ridge-labeled samples on the bright side of the local
    /// gray threshold.
    pub alpha: f64,
    /// Fraction of valley-labeled samples on the dark side.
    pub beta: f64,
    /// (alpha + beta) / 2: 0 = perfectly separated distributions.
    pub overlap: f64,
    /// Whether the underlying sinusoid fit was reliable.
    pub reliable: bool,
}

#[derive(Debug, Error)]
pub enum FeatureError {
    /// No block of the sinusoid model was reliable, so the optimistic
    /// clarity score has no data.
    #[error("no reliable blocks for the optimistic clarity score")]
    NoReliableBlocks,
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Ridge(#[from] RidgeError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Extraction output: the feature vector plus a flag recording whether
/// Q_LCS1 had to fall back to the pessimistic clarity value because no
/// block was reliable.
#[derive(Debug, Clone, Copy)]
pub struct Extraction {
    pub features: FeatureVector,
    pub lcs1_fallback: bool,
}

// ---------------------------------------------------------------------------
// Shared helpers over the segmented artifacts.

fn fg_blocks<'a>(mask: &'a SegmentationMask) -> impl Iterator<Item = (u32, u32)> + 'a {
    mask.grid
        .indices()
        .filter(move |&(bx, by)| mask.is_foreground(bx, by))
}

/// Exact integer pixel sums (Σv, Σv²) over one block, raw gray scale.
fn block_sums(img: &GrayImage, grid: &BlockGrid, bx: u32, by: u32) -> (u64, u64) {
    let (x0, y0) = grid.block_origin(bx, by);
    let (mut s1, mut s2) = (0u64, 0u64);
    for y in y0..y0 + grid.block_size {
        for x in x0..x0 + grid.block_size {
            let v = u64::from(img.get(x, y));
            s1 += v;
            s2 += v * v;
        }
    }
    (s1, s2)
}

/// Population variance of block gray values on the raw 0–255 scale.
fn block_gray_variance(img: &GrayImage, grid: &BlockGrid, bx: u32, by: u32) -> f64 {
    let (s1, s2) = block_sums(img, grid, bx, by);
    let n = u64::from(grid.block_size) * u64::from(grid.block_size);
    let num = u128::from(n) * u128::from(s2) - u128::from(s1) * u128::from(s1);
    num as f64 / (n as f64 * n as f64)
}

/// Fits the sinusoid model on every foreground block; `None` marks blocks
/// where no model exists (degenerate orientation or a profile with fewer
/// than two peaks).
fn block_models(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    params: &SinusoidParams,
) -> Vec<Option<(SinusoidModel, crate::ridge::OrientedWindow)>> {
    let grid = mask.grid;
    let mut out = vec![None; grid.len()];
    for (bx, by) in fg_blocks(mask) {
        if field.is_degenerate(bx, by) {
            continue;
        }
        let window = oriented_window(img, &grid, bx, by, field.theta(bx, by), params);
        if let Ok(model) = fit_from_window(&window, params) {
            out[grid.flat_index(bx, by)] = Some((model, window));
        }
    }
    out
}

/// Scores ridge/valley separability of a fitted block: samples are labeled
/// ridge or valley by the fitted sinusoid's side of its mean level, then
/// counted against that same level. Ridges are dark, so a ridge sample on
/// the bright side (or a valley sample on the dark side) is overlap.
fn clarity_from_model(
    model: &SinusoidModel,
    window: &crate::ridge::OrientedWindow,
) -> BlockClarity {
    let m = model.mean_level;
    let (mut ridge_n, mut ridge_bad, mut valley_n, mut valley_bad) = (0u64, 0u64, 0u64, 0u64);
    for (k, samples) in window.bins.iter().enumerate() {
        let is_ridge = model.fitted[k] < m;
        for &v in samples {
            if is_ridge {
                ridge_n += 1;
                if v > m {
                    ridge_bad += 1;
                }
            } else {
                valley_n += 1;
                if v < m {
                    valley_bad += 1;
                }
            }
        }
    }
    if ridge_n == 0 || valley_n == 0 {
        return BlockClarity {
            alpha: 1.0,
            beta: 1.0,
            overlap: 1.0,
            reliable: model.fit.valid,
        };
    }
    let alpha = ridge_bad as f64 / ridge_n as f64;
    let beta = valley_bad as f64 / valley_n as f64;
    BlockClarity {
        alpha,
        beta,
        overlap: 0.5 * (alpha + beta),
        reliable: model.fit.valid,
    }
}

/// Ridge/valley separability of one foreground block.
pub fn block_clarity(
    img: &GrayImage,
    grid: &BlockGrid,
    bx: u32,
    by: u32,
    theta: f64,
    params: &SinusoidParams,
) -> Result<BlockClarity, RidgeError> {
    let window = oriented_window(img, grid, bx, by, theta, params);
    let model = fit_from_window(&window, params)?;
    Ok(clarity_from_model(&model, &window))
}

// ---------------------------------------------------------------------------
// The ten measures.

fn ocl_from_gradients(
    grads: &GradientField,
    mask: &SegmentationMask,
) -> f64 {
    let grid = mask.grid;
    let centers: Vec<(f64, f64, f64)> = fg_blocks(mask)
        .map(|(bx, by)| {
            let cov = gradient_covariance_block(grads, &grid, bx, by);
            let ocl = if cov.lambda_max > 0.0 {
                1.0 - cov.lambda_min / cov.lambda_max
            } else {
                0.0
            };
            let (cx, cy) = grid.block_center(bx, by);
            (cx, cy, ocl)
        })
        .collect();
    let (mx, my) = mask.centroid;
    let dists: Vec<f64> = centers
        .iter()
        .map(|(cx, cy, _)| (cx - mx).hypot(cy - my))
        .collect();
    let q = dists.iter().sum::<f64>() / dists.len() as f64;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (d, (_, _, ocl)) in dists.iter().zip(&centers) {
        let w = if q > 0.0 {
            (-d * d / (2.0 * q * q)).exp()
        } else {
            1.0
        };
        num += w * ocl;
        den += w;
    }
    (num / den).clamp(0.0, 1.0)
}

/// Orientation certainty: per-block gradient energy concentration along the
/// dominant direction, averaged with Gaussian weights that favor blocks near
/// the foreground centroid.
pub fn q_ocl(
    img: &GrayImage,
    mask: &SegmentationMask,
    _field: &OrientationField,
    _cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let grads = compute_gradients(img)?;
    Ok(ocl_from_gradients(&grads, mask))
}

/// Spectral energy concentration: 1 − H/ln R over the power-spectrum ring
/// profile of the foreground.
pub fn q_e(
    img: &GrayImage,
    mask: &SegmentationMask,
    _field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let s = &cfg.spectrum;
    let prof = power_spectrum_profile(img, &mask.grid, &mask.foreground, s.rings, s.f_lo, s.f_hi)?;
    Ok((1.0 - prof.entropy() / (s.rings as f64).ln()).clamp(0.0, 1.0))
}

/// True for blocks that can contribute an orientation: foreground and
/// non-degenerate.
fn oriented(mask: &SegmentationMask, field: &OrientationField, bx: u32, by: u32) -> bool {
    mask.is_foreground(bx, by) && !field.is_degenerate(bx, by)
}

/// Local orientation quality: agreement of each block's angle with its
/// 8-neighborhood, averaged over blocks that have at least one oriented
/// neighbor (1.0 when no block does).
pub fn q_loq(
    _img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    _cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let grid = mask.grid;
    let mut scores = Vec::new();
    for (bx, by) in grid.indices() {
        if !oriented(mask, field, bx, by) {
            continue;
        }
        let mut acc = 0.0f64;
        let mut n = 0u32;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = bx as i64 + dx;
                let ny = by as i64 + dy;
                if nx < 0 || ny < 0 || nx >= grid.nx as i64 || ny >= grid.ny as i64 {
                    continue;
                }
                let (nx, ny) = (nx as u32, ny as u32);
                if oriented(mask, field, nx, ny) {
                    acc += crate::ridge::orientation_distance(
                        field.theta(bx, by),
                        field.theta(nx, ny),
                    );
                    n += 1;
                }
            }
        }
        if n > 0 {
            let mean_diff = acc / f64::from(n);
            scores.push(1.0 - mean_diff / std::f64::consts::FRAC_PI_2);
        }
    }
    if scores.is_empty() {
        return Ok(1.0);
    }
    Ok((scores.iter().sum::<f64>() / scores.len() as f64).clamp(0.0, 1.0))
}

/// Orientation flow continuity: fraction of consecutive oriented block pairs
/// (along rows and along columns) whose angle difference stays within the
/// continuity threshold (1.0 when no pairs exist).
pub fn q_cof(
    _img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let grid = mask.grid;
    let mut total = 0u64;
    let mut abrupt = 0u64;
    let mut consider = |a: (u32, u32), b: (u32, u32)| {
        if oriented(mask, field, a.0, a.1) && oriented(mask, field, b.0, b.1) {
            total += 1;
            let d = crate::ridge::orientation_distance(
                field.theta(a.0, a.1),
                field.theta(b.0, b.1),
            );
            if d > cfg.thresholds.cof {
                abrupt += 1;
            }
        }
    };
    for by in 0..grid.ny {
        for bx in 0..grid.nx.saturating_sub(1) {
            consider((bx, by), (bx + 1, by));
        }
    }
    for by in 0..grid.ny.saturating_sub(1) {
        for bx in 0..grid.nx {
            consider((bx, by), (bx, by + 1));
        }
    }
    if total == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - abrupt as f64 / total as f64)
}

/// Foreground pixel sums (Σv, Σv², count) with exact integer arithmetic.
fn foreground_sums(img: &GrayImage, mask: &SegmentationMask) -> (u64, u64, u64) {
    let (mut s1, mut s2, mut n) = (0u64, 0u64, 0u64);
    for (bx, by) in fg_blocks(mask) {
        let (b1, b2) = block_sums(img, &mask.grid, bx, by);
        s1 += b1;
        s2 += b2;
        n += u64::from(mask.grid.block_size) * u64::from(mask.grid.block_size);
    }
    (s1, s2, n)
}

/// Mean of unit-normalized gray over the foreground.
pub fn q_mean(
    img: &GrayImage,
    mask: &SegmentationMask,
    _field: &OrientationField,
    _cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let (s1, _, n) = foreground_sums(img, mask);
    Ok(s1 as f64 / (255.0 * n as f64))
}

/// Population standard deviation of unit-normalized foreground gray,
/// range-normalized by 2 (σ cannot exceed 0.5 on [0,1] data).
pub fn q_std(
    img: &GrayImage,
    mask: &SegmentationMask,
    _field: &OrientationField,
    _cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let (s1, s2, n) = foreground_sums(img, mask);
    // n·Σv² − (Σv)² computed in integers so constant regions give σ = 0
    // exactly instead of catastrophic-cancellation dust.
    let num = u128::from(n) * u128::from(s2) - u128::from(s1) * u128::from(s1);
    let den = 255.0 * 255.0 * n as f64 * n as f64;
    let sigma = (num as f64 / den).sqrt();
    Ok((2.0 * sigma).min(1.0))
}

fn clarity_scores(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    params: &SinusoidParams,
) -> Vec<Option<BlockClarity>> {
    block_models(img, mask, field, params)
        .iter()
        .map(|slot| {
            slot.as_ref()
                .map(|(model, window)| clarity_from_model(model, window))
        })
        .collect()
}

fn lcs_from_clarity(
    mask: &SegmentationMask,
    clarity: &[Option<BlockClarity>],
    optimistic: bool,
) -> Result<f64, FeatureError> {
    let mut overlaps = Vec::new();
    for (bx, by) in fg_blocks(mask) {
        let slot = &clarity[mask.grid.flat_index(bx, by)];
        match slot {
            Some(c) if c.reliable => overlaps.push(c.overlap),
            _ if optimistic => {}
            // Pessimistic score: blocks without a reliable model count as
            // fully overlapped.
            _ => overlaps.push(1.0),
        }
    }
    if optimistic && overlaps.is_empty() {
        return Err(FeatureError::NoReliableBlocks);
    }
    let mean = overlaps.iter().sum::<f64>() / overlaps.len() as f64;
    Ok((1.0 - mean).clamp(0.0, 1.0))
}

/// Optimistic local clarity: ridge/valley separation averaged over blocks
/// with a reliable sinusoid model only.
pub fn q_lcs1(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let clarity = clarity_scores(img, mask, field, &cfg.sinusoid_params());
    lcs_from_clarity(mask, &clarity, true)
}

/// Pessimistic local clarity: unreliable blocks count as fully overlapped.
pub fn q_lcs2(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let clarity = clarity_scores(img, mask, field, &cfg.sinusoid_params());
    lcs_from_clarity(mask, &clarity, false)
}

fn amplitude_good(model: &SinusoidModel, cfg: &ToolConfig) -> bool {
    model.fit.valid && model.fit.amplitude / 255.0 >= cfg.thresholds.amplitude
}

/// Fraction of foreground blocks with a reliable sinusoid of sufficient
/// amplitude.
pub fn q_a(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let models = block_models(img, mask, field, &cfg.sinusoid_params());
    let mut good = 0u64;
    let mut total = 0u64;
    for (bx, by) in fg_blocks(mask) {
        total += 1;
        if let Some((model, _)) = &models[mask.grid.flat_index(bx, by)] {
            if amplitude_good(model, cfg) {
                good += 1;
            }
        }
    }
    Ok(good as f64 / total as f64)
}

/// Fraction of foreground blocks whose reliable sinusoid fit explains the
/// block: residual variance at most `variance_ratio` of the block's gray
/// variance.
pub fn q_var(
    img: &GrayImage,
    mask: &SegmentationMask,
    field: &OrientationField,
    cfg: &ToolConfig,
) -> Result<f64, FeatureError> {
    let models = block_models(img, mask, field, &cfg.sinusoid_params());
    let mut good = 0u64;
    let mut total = 0u64;
    for (bx, by) in fg_blocks(mask) {
        total += 1;
        if let Some((model, _)) = &models[mask.grid.flat_index(bx, by)] {
            let var = block_gray_variance(img, &mask.grid, bx, by);
            if model.fit.valid && model.fit.residual_variance <= cfg.thresholds.variance_ratio * var
            {
                good += 1;
            }
        }
    }
    Ok(good as f64 / total as f64)
}

/// Runs the full pipeline on one image: segmentation, orientation field,
/// then the ten measures. Deterministic for a fixed config.
pub fn extract_all(img: &GrayImage, cfg: &ToolConfig) -> Result<Extraction, FeatureError> {
    let mask = segment(img, &cfg.gabor_bank(), cfg.block_size)?;
    let grads = compute_gradients(img)?;
    let field = orientation_field_from(&grads, &mask.grid);
    let params = cfg.sinusoid_params();

    let q_ocl_v = ocl_from_gradients(&grads, &mask);
    let q_e_v = q_e(img, &mask, &field, cfg)?;
    let q_loq_v = q_loq(img, &mask, &field, cfg)?;
    let q_cof_v = q_cof(img, &mask, &field, cfg)?;
    let q_mean_v = q_mean(img, &mask, &field, cfg)?;
    let q_std_v = q_std(img, &mask, &field, cfg)?;

    // One model pass serves clarity, amplitude, and residual scoring.
    let models = block_models(img, &mask, &field, &params);
    let clarity: Vec<Option<BlockClarity>> = models
        .iter()
        .map(|slot| {
            slot.as_ref()
                .map(|(model, window)| clarity_from_model(model, window))
        })
        .collect();
    let q_lcs2_v = lcs_from_clarity(&mask, &clarity, false)?;
    let (q_lcs1_v, lcs1_fallback) = match lcs_from_clarity(&mask, &clarity, true) {
        Ok(v) => (v, false),
        Err(FeatureError::NoReliableBlocks) => (q_lcs2_v, true),
        Err(e) => return Err(e),
    };
    let (mut a_good, mut v_good, mut total) = (0u64, 0u64, 0u64);
    for (bx, by) in fg_blocks(&mask) {
        total += 1;
        if let Some((model, _)) = &models[mask.grid.flat_index(bx, by)] {
            if amplitude_good(model, cfg) {
                a_good += 1;
            }
            let var = block_gray_variance(img, &mask.grid, bx, by);
            if model.fit.valid && model.fit.residual_variance <= cfg.thresholds.variance_ratio * var
            {
                v_good += 1;
            }
        }
    }

    Ok(Extraction {
        features: FeatureVector {
            q_ocl: q_ocl_v,
            q_e: q_e_v,
            q_loq: q_loq_v,
            q_cof: q_cof_v,
            q_mean: q_mean_v,
            q_std: q_std_v,
            q_lcs1: q_lcs1_v,
            q_lcs2: q_lcs2_v,
            q_a: a_good as f64 / total as f64,
            q_var: v_good as f64 / total as f64,
        },
        lcs1_fallback,
    })
}
