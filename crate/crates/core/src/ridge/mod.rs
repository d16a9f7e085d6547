//! Shared numeric kernels for ridge structure analysis: image gradients,
//! the block orientation field, gradient second-moment (covariance)
//! summaries, the global power-spectrum ring profile, and the sinusoidal
//! ridge–valley model. Every quality measure is built from these.

mod sinusoid;
mod spectrum;

pub use sinusoid::{
    fit_from_window, oriented_window, sinusoid_fit_block, OrientedWindow, SinusoidFit,
    SinusoidModel, SinusoidParams, XSignature,
};
pub use spectrum::{power_spectrum_profile, SpectralProfile};

use crate::image::{BlockGrid, GrayImage};
use thiserror::Error;

/// Errors raised by the ridge-analysis kernels.
#[derive(Debug, Error, PartialEq)]
pub enum RidgeError {
    /// Gradients need at least a 3×3 image.
    #[error("image {width}x{height} too small for gradient analysis (needs 3x3)")]
    ImageTooSmall { width: u32, height: u32 },
    /// The foreground carries no spectral energy in the analysis band
    /// (e.g. constant foreground).
    #[error("zero spectral energy in the analysis band")]
    ZeroEnergy,
    /// The block's ridge profile shows fewer than two peaks, so no period
    /// can be estimated.
    #[error("degenerate block: ridge signature has fewer than two peaks")]
    DegenerateBlock,
    /// Parameters outside their documented validity range.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// Per-pixel horizontal/vertical derivatives of unit-normalized gray.
#[derive(Debug, Clone)]
pub struct GradientField {
    width: u32,
    height: u32,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

impl GradientField {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn gx(&self, x: u32, y: u32) -> f64 {
        self.gx[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn gy(&self, x: u32, y: u32) -> f64 {
        self.gy[y as usize * self.width as usize + x as usize]
    }
}

/// Per-block dominant ridge direction in [0, π), measured from the +x axis.
/// Blocks whose gradients vanish everywhere carry θ = 0 and a degenerate
/// flag so aggregations can skip them instead of trusting a fabricated
/// angle.
#[derive(Debug, Clone)]
pub struct OrientationField {
    pub grid: BlockGrid,
    theta: Vec<f64>,
    degenerate: Vec<bool>,
}

impl OrientationField {
    /// Builds a field from raw per-block angles and degeneracy flags
    /// (row-major, one entry per grid block). Useful for synthetic fields
    /// in calibration and testing.
    ///
    /// # Panics
    /// If either vector length differs from `grid.len()`.
    pub fn from_parts(grid: BlockGrid, theta: Vec<f64>, degenerate: Vec<bool>) -> Self {
        assert_eq!(theta.len(), grid.len(), "theta length must match grid");
        assert_eq!(degenerate.len(), grid.len(), "flag length must match grid");
        Self {
            grid,
            theta,
            degenerate,
        }
    }

    #[inline]
    pub fn theta(&self, bx: u32, by: u32) -> f64 {
        self.theta[self.grid.flat_index(bx, by)]
    }

    #[inline]
    pub fn is_degenerate(&self, bx: u32, by: u32) -> bool {
        self.degenerate[self.grid.flat_index(bx, by)]
    }
}

/// Second-moment matrix of block gradients and its eigenvalues.
#[derive(Debug, Clone, Copy)]
pub struct GradientCovariance {
    pub jxx: f64,
    pub jxy: f64,
    pub jyy: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

/// 3×3 Sobel derivatives of gray/255 with replicated edges, scaled by 1/8 so
/// a unit-slope normalized ramp reads as gradient 1.
pub fn compute_gradients(img: &GrayImage) -> Result<GradientField, RidgeError> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(RidgeError::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    let n = w as usize * h as usize;
    let mut gx = vec![0.0f64; n];
    let mut gy = vec![0.0f64; n];
    let clampx = |v: i64| v.clamp(0, w as i64 - 1) as u32;
    let clampy = |v: i64| v.clamp(0, h as i64 - 1) as u32;
    for y in 0..h {
        let (ym, yp) = (clampy(y as i64 - 1), clampy(y as i64 + 1));
        for x in 0..w {
            let (xm, xp) = (clampx(x as i64 - 1), clampx(x as i64 + 1));
            let p = |xx: u32, yy: u32| f64::from(img.get(xx, yy)) / 255.0;
            let (a, b, c) = (p(xm, ym), p(x, ym), p(xp, ym));
            let (d, e) = (p(xm, y), p(xp, y));
            let (f, g, hh) = (p(xm, yp), p(x, yp), p(xp, yp));
            let idx = y as usize * w as usize + x as usize;
            gx[idx] = ((c + 2.0 * e + hh) - (a + 2.0 * d + f)) / 8.0;
            gy[idx] = ((f + 2.0 * g + hh) - (a + 2.0 * b + c)) / 8.0;
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        gx,
        gy,
    })
}

/// Averages gradient directions per block with the double-angle method:
/// θ = ½·atan2(Σ 2·gx·gy, Σ (gx² − gy²)) + π/2, wrapped to [0, π). The +π/2
/// turns the dominant gradient direction into the ridge-flow direction.
pub fn orientation_field_from(grads: &GradientField, grid: &BlockGrid) -> OrientationField {
    let mut theta = Vec::with_capacity(grid.len());
    let mut degenerate = Vec::with_capacity(grid.len());
    for (bx, by) in grid.indices() {
        let (x0, y0) = grid.block_origin(bx, by);
        let mut sin_sum = 0.0;
        let mut cos_sum = 0.0;
        let mut energy = 0.0;
        for y in y0..y0 + grid.block_size {
            for x in x0..x0 + grid.block_size {
                let (gx, gy) = (grads.gx(x, y), grads.gy(x, y));
                sin_sum += 2.0 * gx * gy;
                cos_sum += gx * gx - gy * gy;
                energy += gx * gx + gy * gy;
            }
        }
        if energy == 0.0 {
            theta.push(0.0);
            degenerate.push(true);
        } else {
            let mut t = 0.5 * sin_sum.atan2(cos_sum) + std::f64::consts::FRAC_PI_2;
            if t >= std::f64::consts::PI {
                t -= std::f64::consts::PI;
            }
            if t < 0.0 {
                t += std::f64::consts::PI;
            }
            theta.push(t);
            degenerate.push(false);
        }
    }
    OrientationField {
        grid: *grid,
        theta,
        degenerate,
    }
}

/// Convenience wrapper computing gradients internally.
pub fn orientation_field(img: &GrayImage, grid: &BlockGrid) -> Result<OrientationField, RidgeError> {
    Ok(orientation_field_from(&compute_gradients(img)?, grid))
}

/// Second-moment sums of block gradients with closed-form eigenvalues.
pub fn gradient_covariance_block(
    grads: &GradientField,
    grid: &BlockGrid,
    bx: u32,
    by: u32,
) -> GradientCovariance {
    let (x0, y0) = grid.block_origin(bx, by);
    let (mut jxx, mut jxy, mut jyy) = (0.0f64, 0.0f64, 0.0f64);
    for y in y0..y0 + grid.block_size {
        for x in x0..x0 + grid.block_size {
            let (gx, gy) = (grads.gx(x, y), grads.gy(x, y));
            jxx += gx * gx;
            jxy += gx * gy;
            jyy += gy * gy;
        }
    }
    let half_trace = 0.5 * (jxx + jyy);
    let disc = (0.25 * (jxx - jyy) * (jxx - jyy) + jxy * jxy).sqrt();
    let lambda_max = half_trace + disc;
    // The moment matrix is positive semidefinite; any negativity is floating
    // point noise, so clamp.
    let lambda_min = (half_trace - disc).max(0.0);
    GradientCovariance {
        jxx,
        jxy,
        jyy,
        lambda_max,
        lambda_min,
    }
}

/// Shortest angular distance between two undirected orientations in [0, π).
#[inline]
pub fn orientation_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(std::f64::consts::PI - d)
}
