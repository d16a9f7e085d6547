//! Sinusoidal ridge–valley model of a block.
//!
//! An oriented window is centered on the block: long axis across the ridges,
//! short axis along them. Averaging gray values along the ridge direction
//! collapses the window to a 1-D profile (the x-signature) that looks like a
//! sinusoid wherever ridge structure is clean. Peak spacing estimates the
//! ridge period, peak/valley contrast the amplitude, and a least-squares
//! sinusoid fit yields a residual that quantifies how well the model holds.

use super::RidgeError;
use crate::image::{BlockGrid, GrayImage};

/// Oriented-window geometry and reliability rules for the sinusoid model.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidParams {
    /// Window bins across the ridges (profile length), px.
    pub window_length: u32,
    /// Samples averaged along the ridges per bin (window width), px.
    pub window_width: u32,
    /// Smallest plausible ridge period, px.
    pub period_min: f64,
    /// Largest plausible ridge period, px.
    pub period_max: f64,
    /// Minimum peak-to-valley half-contrast for a reliable fit, gray levels.
    pub min_amplitude: f64,
}

impl Default for SinusoidParams {
    fn default() -> Self {
        Self {
            window_length: 32,
            window_width: 16,
            period_min: 3.0,
            period_max: 25.0,
            min_amplitude: 4.0,
        }
    }
}

/// The 1-D across-ridge profile of a block: one mean gray value (0–255 scale)
/// per window bin. Bins whose samples all fall outside the image are dropped,
/// so the profile may be shorter than the configured window length near
/// borders.
#[derive(Debug, Clone)]
pub struct XSignature {
    pub values: Vec<f64>,
}

/// Result of modeling a block profile as a sinusoid.
#[derive(Debug, Clone, Copy)]
pub struct SinusoidFit {
    /// Half the mean peak-to-valley contrast, gray levels.
    pub amplitude: f64,
    /// Mean spacing of consecutive refined peaks, px.
    pub period: f64,
    /// Mean squared deviation of the profile from the fitted sinusoid, gray².
    pub residual_variance: f64,
    /// True when every peak spacing lies inside [period_min, period_max] and
    /// the amplitude clears min_amplitude: the profile is a trustworthy
    /// ridge model.
    pub valid: bool,
}

/// Raw oriented-window samples of one block, grouped by across-ridge bin.
#[derive(Debug, Clone)]
pub struct OrientedWindow {
    /// In-bounds bilinear samples per kept bin, raw gray scale.
    pub bins: Vec<Vec<f64>>,
}

/// A fitted block model bundling the profile, the fit, and the fitted curve
/// (needed by clarity scoring, which classifies samples against it).
#[derive(Debug, Clone)]
pub struct SinusoidModel {
    pub fit: SinusoidFit,
    pub signature: XSignature,
    /// Constant term of the least-squares fit: the local gray level that
    /// separates ridge from valley.
    pub mean_level: f64,
    /// Fitted sinusoid evaluated at each kept bin.
    pub fitted: Vec<f64>,
}

fn bilinear(img: &GrayImage, x: f64, y: f64) -> Option<f64> {
    let (w, h) = (img.width() as f64 - 1.0, img.height() as f64 - 1.0);
    if !(0.0..=w).contains(&x) || !(0.0..=h).contains(&y) {
        return None;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let xi = x0 as u32;
    let yi = y0 as u32;
    let x1 = (xi + 1).min(img.width() - 1);
    let y1 = (yi + 1).min(img.height() - 1);
    let p = |xx, yy| f64::from(img.get(xx, yy));
    Some(
        (1.0 - fx) * (1.0 - fy) * p(xi, yi)
            + fx * (1.0 - fy) * p(x1, yi)
            + (1.0 - fx) * fy * p(xi, y1)
            + fx * fy * p(x1, y1),
    )
}

/// Samples the oriented window of block (bx, by): `window_length` bins across
/// the ridge direction `theta`, each averaging `window_width` bilinear
/// samples along it. Out-of-image samples are skipped; empty bins dropped.
pub fn oriented_window(
    img: &GrayImage,
    grid: &BlockGrid,
    bx: u32,
    by: u32,
    theta: f64,
    params: &SinusoidParams,
) -> OrientedWindow {
    let (cx, cy) = grid.block_center(bx, by);
    let (sin_t, cos_t) = theta.sin_cos();
    // Along-ridge unit vector (cos θ, sin θ); across-ridge (−sin θ, cos θ).
    let half_len = (params.window_length as f64 - 1.0) / 2.0;
    let half_wid = (params.window_width as f64 - 1.0) / 2.0;
    let mut bins = Vec::with_capacity(params.window_length as usize);
    for k in 0..params.window_length {
        let u = f64::from(k) - half_len;
        let mut samples = Vec::with_capacity(params.window_width as usize);
        for j in 0..params.window_width {
            let t = f64::from(j) - half_wid;
            let x = cx - u * sin_t + t * cos_t;
            let y = cy + u * cos_t + t * sin_t;
            if let Some(v) = bilinear(img, x, y) {
                samples.push(v);
            }
        }
        if !samples.is_empty() {
            bins.push(samples);
        }
    }
    OrientedWindow { bins }
}

/// Local maxima of `s` at interior indices, with sub-bin parabolic
/// refinement. `sign` +1 finds peaks, −1 valleys.
fn extrema(s: &[f64], sign: f64) -> (Vec<f64>, Vec<f64>) {
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for i in 1..s.len().saturating_sub(1) {
        let (a, b, c) = (sign * s[i - 1], sign * s[i], sign * s[i + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let delta = if denom.abs() < 1e-12 {
                0.0
            } else {
                (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
            };
            positions.push(i as f64 + delta);
            values.push(s[i]);
        }
    }
    (positions, values)
}

/// Solves the 3×3 system `m·x = rhs` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut v = rhs[col];
        for k in col + 1..3 {
            v -= m[col][k] * x[k];
        }
        x[col] = v / m[col][col];
    }
    Some(x)
}

/// Fits the sinusoid model to an already-sampled window.
pub fn fit_from_window(
    window: &OrientedWindow,
    params: &SinusoidParams,
) -> Result<SinusoidModel, RidgeError> {
    let s: Vec<f64> = window
        .bins
        .iter()
        .map(|b| b.iter().sum::<f64>() / b.len() as f64)
        .collect();
    let (peak_pos, peak_val) = extrema(&s, 1.0);
    if peak_pos.len() < 2 {
        return Err(RidgeError::DegenerateBlock);
    }
    let (_, valley_val) = extrema(&s, -1.0);
    if valley_val.is_empty() {
        return Err(RidgeError::DegenerateBlock);
    }
    let spacings: Vec<f64> = peak_pos.windows(2).map(|w| w[1] - w[0]).collect();
    let period = spacings.iter().sum::<f64>() / spacings.len() as f64;
    let mean_peak = peak_val.iter().sum::<f64>() / peak_val.len() as f64;
    let mean_valley = valley_val.iter().sum::<f64>() / valley_val.len() as f64;
    let amplitude = 0.5 * (mean_peak - mean_valley);

    // Least-squares fit s ≈ c0 + c1·cos(2πx/T) + c2·sin(2πx/T) at the
    // estimated period.
    let omega = 2.0 * std::f64::consts::PI / period;
    let n = s.len();
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (i, &y) in s.iter().enumerate() {
        let basis = [1.0, (omega * i as f64).cos(), (omega * i as f64).sin()];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            rhs[r] += basis[r] * y;
        }
    }
    let (mean_level, fitted) = match solve3(m, rhs) {
        Some([c0, c1, c2]) => {
            let fitted: Vec<f64> = (0..n)
                .map(|i| c0 + c1 * (omega * i as f64).cos() + c2 * (omega * i as f64).sin())
                .collect();
            (c0, fitted)
        }
        None => {
            // Collinear basis (e.g. period locked to bin spacing): fall back
            // to the constant model.
            let mean = s.iter().sum::<f64>() / n as f64;
            (mean, vec![mean; n])
        }
    };
    let residual_variance = s
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f) * (y - f))
        .sum::<f64>()
        / n as f64;

    let valid = spacings
        .iter()
        .all(|&d| d >= params.period_min && d <= params.period_max)
        && amplitude >= params.min_amplitude;

    Ok(SinusoidModel {
        fit: SinusoidFit {
            amplitude,
            period,
            residual_variance,
            valid,
        },
        signature: XSignature { values: s },
        mean_level,
        fitted,
    })
}

/// Samples the oriented window of a block and fits the sinusoid model.
pub fn sinusoid_fit_block(
    img: &GrayImage,
    grid: &BlockGrid,
    bx: u32,
    by: u32,
    theta: f64,
    params: &SinusoidParams,
) -> Result<SinusoidModel, RidgeError> {
    fit_from_window(&oriented_window(img, grid, bx, by, theta, params), params)
}
