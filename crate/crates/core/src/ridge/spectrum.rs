//! Global power-spectrum ring profile of the segmented fingerprint.
//!
//! The foreground blocks are mean-removed and transformed with a 2-D DFT;
//! squared magnitudes are pooled into equal-width annuli of radial frequency
//! and summarized by the entropy of the normalized ring energies. Ridge-like
//! imagery concentrates energy in few rings (low entropy); degraded or noisy
//! imagery spreads it (high entropy).

use super::RidgeError;
use crate::image::{BlockGrid, GrayImage};
use rustfft::{num_complex::Complex, FftPlanner};

/// Normalized ring energies and their entropy.
#[derive(Debug, Clone)]
pub struct SpectralProfile {
    ring_energies: Vec<f64>,
    entropy: f64,
    f_lo: f64,
    f_hi: f64,
}

impl SpectralProfile {
    /// Normalized per-ring energies p_i (sum 1).
    pub fn ring_energies(&self) -> &[f64] {
        &self.ring_energies
    }

    /// Shannon entropy of the ring energies, natural log.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn ring_count(&self) -> usize {
        self.ring_energies.len()
    }

    /// Center frequency of ring `i`, cycles/pixel.
    pub fn f_center(&self, i: usize) -> f64 {
        let width = (self.f_hi - self.f_lo) / self.ring_count() as f64;
        self.f_lo + (i as f64 + 0.5) * width
    }
}

/// Signed normalized frequency of DFT bin `u` out of `n`: 0, 1/n, …, ±1/2.
#[inline]
fn bin_frequency(u: usize, n: usize) -> f64 {
    if u <= n / 2 {
        u as f64 / n as f64
    } else {
        (u as f64 - n as f64) / n as f64
    }
}

/// Builds the mean-removed, foreground-windowed signal: gray/255 minus the
/// foreground mean inside foreground blocks, zero elsewhere. The mean uses an
/// exact integer pixel sum so a constant foreground yields exact zeros.
fn masked_signal(img: &GrayImage, grid: &BlockGrid, foreground: &[bool]) -> Option<Vec<f64>> {
    let mut sum: u64 = 0;
    let mut count: u64 = 0;
    for (bx, by) in grid.indices() {
        if !foreground[grid.flat_index(bx, by)] {
            continue;
        }
        let (x0, y0) = grid.block_origin(bx, by);
        for y in y0..y0 + grid.block_size {
            for x in x0..x0 + grid.block_size {
                sum += u64::from(img.get(x, y));
                count += 1;
            }
        }
    }
    if count == 0 {
        return None;
    }
    let mean = sum as f64 / (255.0 * count as f64);
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut signal = vec![0.0f64; w * h];
    for (bx, by) in grid.indices() {
        if !foreground[grid.flat_index(bx, by)] {
            continue;
        }
        let (x0, y0) = grid.block_origin(bx, by);
        for y in y0..y0 + grid.block_size {
            for x in x0..x0 + grid.block_size {
                signal[y as usize * w + x as usize] = f64::from(img.get(x, y)) / 255.0 - mean;
            }
        }
    }
    Some(signal)
}

/// Pools 2-D DFT power into `rings` equal-width annuli of radial frequency
/// spanning [f_lo, f_hi] (upper edge inclusive) and computes the entropy of
/// the normalized energies.
pub fn power_spectrum_profile(
    img: &GrayImage,
    grid: &BlockGrid,
    foreground: &[bool],
    rings: usize,
    f_lo: f64,
    f_hi: f64,
) -> Result<SpectralProfile, RidgeError> {
    if rings < 2 {
        return Err(RidgeError::InvalidParams(format!(
            "ring count {rings} < 2"
        )));
    }
    if !(0.0 < f_lo && f_lo < f_hi && f_hi <= 0.5) {
        return Err(RidgeError::InvalidParams(format!(
            "bad frequency band [{f_lo}, {f_hi}]"
        )));
    }
    if foreground.len() != grid.len() {
        return Err(RidgeError::InvalidParams(
            "foreground mask does not match grid".into(),
        ));
    }
    let signal = masked_signal(img, grid, foreground)
        .ok_or_else(|| RidgeError::InvalidParams("no foreground blocks".into()))?;

    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .map(|&re| Complex { re, im: 0.0 })
        .collect();

    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex { re: 0.0, im: 0.0 }; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }

    let ring_width = (f_hi - f_lo) / rings as f64;
    let mut energy = vec![0.0f64; rings];
    for v in 0..h {
        let fv = bin_frequency(v, h);
        for u in 0..w {
            let fu = bin_frequency(u, w);
            let f = fu.hypot(fv);
            if f < f_lo || f > f_hi {
                continue;
            }
            let idx = (((f - f_lo) / ring_width) as usize).min(rings - 1);
            energy[idx] += buf[v * w + u].norm_sqr();
        }
    }

    let total: f64 = energy.iter().sum();
    if total == 0.0 {
        return Err(RidgeError::ZeroEnergy);
    }
    let ring_energies: Vec<f64> = energy.iter().map(|e| e / total).collect();
    let entropy = -ring_energies
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>();
    Ok(SpectralProfile {
        ring_energies,
        entropy,
        f_lo,
        f_hi,
    })
}
