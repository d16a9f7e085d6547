//! Tool configuration: every tunable constant of the pipeline in one TOML
//! document with dotted keys (e.g. `spectrum.rings = 15`). Any key may be
//! omitted; defaults reproduce the built-in calibration. Unknown keys are
//! rejected so typos cannot silently fall back to defaults.

use crate::ridge::SinusoidParams;
use crate::segmentation::GaborBankConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Environment variable consulted for a config path when no explicit path is
/// given.
pub const CONFIG_ENV_VAR: &str = "LIVEPRINT_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Gabor filter-bank section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaborSection {
    pub orientations: u32,
    pub frequency: f64,
    pub sigma: f64,
    pub threshold: f64,
}

impl Default for GaborSection {
    fn default() -> Self {
        let g = GaborBankConfig::default();
        Self {
            orientations: g.n_orientations,
            frequency: g.frequency,
            sigma: g.sigma,
            threshold: g.threshold,
        }
    }
}

/// Power-spectrum ring profile section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub rings: usize,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            rings: 15,
            f_lo: 0.06,
            f_hi: 0.45,
        }
    }
}

/// Feature decision thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSection {
    /// Orientation-continuity threshold, radians.
    pub cof: f64,
    /// Minimum reliable sinusoid amplitude on unit-normalized gray.
    pub amplitude: f64,
    /// Maximum residual-to-block-variance ratio of a good sinusoid fit.
    pub variance_ratio: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            cof: std::f64::consts::FRAC_PI_8,
            amplitude: 8.0 / 255.0,
            variance_ratio: 0.5,
        }
    }
}

/// Oriented-window sinusoid model section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SinusoidSection {
    pub window_length: u32,
    pub window_width: u32,
    pub period_min: f64,
    pub period_max: f64,
    /// Gray levels (0–255 scale).
    pub min_amplitude: f64,
}

impl Default for SinusoidSection {
    fn default() -> Self {
        let s = SinusoidParams::default();
        Self {
            window_length: s.window_length,
            window_width: s.window_width,
            period_min: s.period_min,
            period_max: s.period_max,
            min_amplitude: s.min_amplitude,
        }
    }
}

/// Report formatting section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportSection {
    /// Decimal places for percentages.
    pub precision: u8,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self { precision: 2 }
    }
}

/// Complete tool configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToolConfig {
    #[serde(default = "default_block_size")]
    pub block_size: u32,
    pub gabor: GaborSection,
    pub spectrum: SpectrumSection,
    pub thresholds: ThresholdSection,
    pub sinusoid: SinusoidSection,
    pub report: ReportSection,
}

fn default_block_size() -> u32 {
    16
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            block_size: default_block_size(),
            gabor: GaborSection::default(),
            spectrum: SpectrumSection::default(),
            thresholds: ThresholdSection::default(),
            sinusoid: SinusoidSection::default(),
            report: ReportSection::default(),
        }
    }
}

impl ToolConfig {
    /// Parses a TOML document and validates every value range.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ToolConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Resolves the effective config: explicit path if given, else the
    /// `LIVEPRINT_CONFIG` environment variable, else built-in defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        if let Ok(env_path) = std::env::var(CONFIG_ENV_VAR) {
            if !env_path.is_empty() {
                return Self::load(Path::new(&env_path));
            }
        }
        Ok(Self::default())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError::Invalid(msg));
        if self.block_size < 4 {
            return fail(format!("block_size {} < 4", self.block_size));
        }
        let g = &self.gabor;
        if g.orientations < 2 {
            return fail(format!("gabor.orientations {} < 2", g.orientations));
        }
        if !(g.frequency > 0.0 && g.frequency < 0.5) {
            return fail(format!("gabor.frequency {} outside (0, 0.5)", g.frequency));
        }
        if !(g.sigma > 0.0 && g.sigma.is_finite()) {
            return fail(format!("gabor.sigma {} not positive", g.sigma));
        }
        if !(g.threshold >= 0.0 && g.threshold.is_finite()) {
            return fail(format!("gabor.threshold {} negative", g.threshold));
        }
        let s = &self.spectrum;
        if s.rings < 2 {
            return fail(format!("spectrum.rings {} < 2", s.rings));
        }
        if !(0.0 < s.f_lo && s.f_lo < s.f_hi && s.f_hi <= 0.5) {
            return fail(format!(
                "spectrum band [{}, {}] invalid (need 0 < f_lo < f_hi <= 0.5)",
                s.f_lo, s.f_hi
            ));
        }
        let t = &self.thresholds;
        if !(t.cof > 0.0 && t.cof <= std::f64::consts::FRAC_PI_2) {
            return fail(format!("thresholds.cof {} outside (0, pi/2]", t.cof));
        }
        if !(0.0..=1.0).contains(&t.amplitude) {
            return fail(format!("thresholds.amplitude {} outside [0, 1]", t.amplitude));
        }
        if !(t.variance_ratio > 0.0 && t.variance_ratio.is_finite()) {
            return fail(format!(
                "thresholds.variance_ratio {} not positive",
                t.variance_ratio
            ));
        }
        let w = &self.sinusoid;
        if w.window_length < 8 {
            return fail(format!("sinusoid.window_length {} < 8", w.window_length));
        }
        if w.window_width < 1 {
            return fail("sinusoid.window_width 0".into());
        }
        if !(0.0 < w.period_min && w.period_min < w.period_max) {
            return fail(format!(
                "sinusoid period window [{}, {}] invalid",
                w.period_min, w.period_max
            ));
        }
        if !(w.min_amplitude >= 0.0 && w.min_amplitude.is_finite()) {
            return fail(format!(
                "sinusoid.min_amplitude {} negative",
                w.min_amplitude
            ));
        }
        if self.report.precision > 6 {
            return fail(format!("report.precision {} > 6", self.report.precision));
        }
        Ok(())
    }

    pub fn gabor_bank(&self) -> GaborBankConfig {
        GaborBankConfig {
            n_orientations: self.gabor.orientations,
            frequency: self.gabor.frequency,
            sigma: self.gabor.sigma,
            threshold: self.gabor.threshold,
        }
    }

    pub fn sinusoid_params(&self) -> SinusoidParams {
        SinusoidParams {
            window_length: self.sinusoid.window_length,
            window_width: self.sinusoid.window_width,
            period_min: self.sinusoid.period_min,
            period_max: self.sinusoid.period_max,
            min_amplitude: self.sinusoid.min_amplitude,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ToolConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.block_size, 16);
        assert_eq!(cfg.gabor.orientations, 8);
        assert_eq!(cfg.spectrum.rings, 15);
        assert!((cfg.thresholds.cof - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert!((cfg.thresholds.amplitude - 8.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn dotted_keys_override_defaults() {
        let cfg = ToolConfig::from_toml(
            "block_size = 32\nspectrum.rings = 20\ngabor.threshold = 0.02\n",
        )
        .unwrap();
        assert_eq!(cfg.block_size, 32);
        assert_eq!(cfg.spectrum.rings, 20);
        assert!((cfg.gabor.threshold - 0.02).abs() < 1e-15);
        // Untouched keys keep defaults.
        assert_eq!(cfg.sinusoid.window_length, 32);
    }

    #[test]
    fn section_tables_also_work() {
        let cfg = ToolConfig::from_toml("[thresholds]\ncof = 0.5\n").unwrap();
        assert!((cfg.thresholds.cof - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            ToolConfig::from_toml("spectrum.ringz = 3\n"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            ToolConfig::from_toml("blok_size = 16\n"),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        for bad in [
            "block_size = 2\n",
            "gabor.frequency = 0.7\n",
            "gabor.orientations = 1\n",
            "spectrum.f_lo = 0.3\nspectrum.f_hi = 0.2\n",
            "thresholds.cof = 0.0\n",
            "thresholds.amplitude = 1.5\n",
            "sinusoid.period_min = 30.0\n",
            "report.precision = 9\n",
        ] {
            assert!(
                matches!(ToolConfig::from_toml(bad), Err(ConfigError::Invalid(_))),
                "accepted bad config: {bad}"
            );
        }
    }

    #[test]
    fn resolve_prefers_explicit_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "block_size = 48\n").unwrap();
        let cfg = ToolConfig::resolve(Some(&path)).unwrap();
        assert_eq!(cfg.block_size, 48);
        assert!(ToolConfig::load(Path::new("/nonexistent/liveprint.toml")).is_err());
    }

    #[test]
    fn conversions_carry_values() {
        let cfg = ToolConfig::from_toml("gabor.sigma = 3.0\nsinusoid.period_max = 20.0\n").unwrap();
        assert!((cfg.gabor_bank().sigma - 3.0).abs() < 1e-15);
        assert!((cfg.sinusoid_params().period_max - 20.0).abs() < 1e-15);
    }
}
