//! Command-line interface: extraction over a manifest, subset selection,
//! cross-sensor evaluation, segmentation-mask export, and the synthetic
//! image generator.
//!
//! Exit codes: 0 = success, 1 = per-sample failures during a batch,
//! 2 = invocation or configuration error.

use crate::classify::{
    cross_sensor_report, exhaustive_select, LabeledSample, SubsetMask,
};
use crate::config::ToolConfig;
use crate::features::{extract_all, FeatureError};
use crate::image::{load_pgm, save_pgm, ImageError};
use crate::manifest::{load_manifest, write_features_csv, read_features_csv};
use crate::report::{
    render_cross_sensor_json, render_cross_sensor_text, render_selection_json,
    render_selection_text,
};
use crate::ridge::RidgeError;
use crate::segmentation::{segment, SegmentationError};
use crate::synth::{generate, gaussian_blur, SynthKind, SynthSpec};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "liveprint",
    version,
    about = "Single-image fingerprint liveness detection from quality measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Extract the ten quality measures for every image in a manifest.
    Extract {
        /// Manifest CSV: path,label,sensor,material.
        #[arg(long)]
        manifest: PathBuf,
        /// Output feature CSV path; failures go to "<out>.errors".
        #[arg(long)]
        out: PathBuf,
        /// Config TOML (falls back to $LIVEPRINT_CONFIG, then defaults).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Exhaustive feature-subset search for one sensor's samples.
    Select {
        /// Feature CSV produced by `extract`.
        #[arg(long)]
        features: PathBuf,
        /// Sensor whose samples to search over.
        #[arg(long)]
        sensor: String,
        /// Write the text report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a JSON report here.
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate one feature subset on each sensor (plus TOTAL means).
    Evaluate {
        /// Feature CSV produced by `extract`.
        #[arg(long)]
        features: PathBuf,
        /// Comma-separated feature names, e.g. "Q_E,Q_STD".
        #[arg(long)]
        subset: String,
        /// Comma-separated sensor order; defaults to order of appearance.
        #[arg(long)]
        sensors: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the block foreground mask of one image as a PGM (255 = ridge).
    Segment {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate a synthetic fingerprint-like test image.
    Synth {
        /// parallel | whorl | noise | mixed | disc-on-flat
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 128)]
        width: u32,
        #[arg(long, default_value_t = 128)]
        height: u32,
        /// Ridge direction in degrees.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        /// Ridge period in pixels.
        #[arg(long, default_value_t = 10.0)]
        period: f64,
        /// Ridge amplitude in gray levels.
        #[arg(long, default_value_t = 100.0)]
        amplitude: f64,
        /// Additive Gaussian noise sigma in gray levels.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional Gaussian blur applied after generation.
        #[arg(long)]
        blur_sigma: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Short stable names for the per-sample failure log.
fn error_name(err: &SampleError) -> &'static str {
    match err {
        SampleError::Io => "Io",
        SampleError::Image(e) => match e {
            ImageError::MalformedHeader(_) => "MalformedHeader",
            ImageError::TruncatedData { .. } => "TruncatedData",
            ImageError::UnsupportedDepth(_) => "UnsupportedDepth",
            ImageError::PixelCountMismatch { .. } => "PixelCountMismatch",
            ImageError::ImageTooSmall { .. } => "ImageTooSmall",
            ImageError::InvalidBlockSize(_) => "InvalidBlockSize",
        },
        SampleError::Feature(e) => match e {
            FeatureError::NoReliableBlocks => "NoReliableBlocks",
            FeatureError::Segmentation(s) => match s {
                SegmentationError::EmptyForeground => "EmptyForeground",
                SegmentationError::InvalidConfig(_) => "InvalidConfig",
                SegmentationError::Image(ImageError::MalformedHeader(_)) => "MalformedHeader",
                SegmentationError::Image(ImageError::TruncatedData { .. }) => "TruncatedData",
                SegmentationError::Image(ImageError::UnsupportedDepth(_)) => "UnsupportedDepth",
                SegmentationError::Image(ImageError::PixelCountMismatch { .. }) => {
                    "PixelCountMismatch"
                }
                SegmentationError::Image(ImageError::ImageTooSmall { .. }) => "ImageTooSmall",
                SegmentationError::Image(ImageError::InvalidBlockSize(_)) => "InvalidBlockSize",
            },
            FeatureError::Ridge(r) => match r {
                RidgeError::ImageTooSmall { .. } => "ImageTooSmall",
                RidgeError::ZeroEnergy => "ZeroEnergy",
                RidgeError::DegenerateBlock => "DegenerateBlock",
                RidgeError::InvalidParams(_) => "InvalidParams",
            },
            FeatureError::Image(_) => "ImageError",
        },
    }
}

enum SampleError {
    Io,
    Image(ImageError),
    Feature(FeatureError),
}

fn usage<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_extract(manifest: &Path, out: &Path, config: Option<&Path>) -> Result<i32, String> {
    let cfg = ToolConfig::resolve(config).map_err(usage)?;
    let records = load_manifest(manifest).map_err(usage)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut rows: Vec<LabeledSample> = Vec::new();
    let mut failures: Vec<(String, &'static str)> = Vec::new();
    for record in &records {
        let path = record.resolve(base);
        let id = record.id();
        let outcome = std::fs::read(&path)
            .map_err(|_| SampleError::Io)
            .and_then(|bytes| load_pgm(&bytes).map_err(SampleError::Image))
            .and_then(|img| extract_all(&img, &cfg).map_err(SampleError::Feature));
        match outcome {
            Ok(extraction) => rows.push(LabeledSample {
                id,
                sensor: record.sensor.clone(),
                label: record.label,
                material: record.material.clone(),
                features: extraction.features,
            }),
            Err(e) => failures.push((id, error_name(&e))),
        }
    }
    let file = std::fs::File::create(out).map_err(|e| format!("create {}: {e}", out.display()))?;
    write_features_csv(file, &rows).map_err(usage)?;
    let sidecar = PathBuf::from(format!("{}.errors", out.display()));
    if failures.is_empty() {
        match std::fs::remove_file(&sidecar) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(format!("remove {}: {e}", sidecar.display())),
        }
        Ok(0)
    } else {
        let mut log = String::new();
        for (id, name) in &failures {
            log.push_str(&format!("{id},{name}\n"));
        }
        std::fs::write(&sidecar, log).map_err(|e| format!("write {}: {e}", sidecar.display()))?;
        eprintln!(
            "{} of {} samples failed; see {}",
            failures.len(),
            records.len(),
            sidecar.display()
        );
        Ok(1)
    }
}

fn cmd_select(
    features: &Path,
    sensor: &str,
    out: Option<&Path>,
    json_out: Option<&Path>,
    config: Option<&Path>,
) -> Result<i32, String> {
    let cfg = ToolConfig::resolve(config).map_err(usage)?;
    let text = std::fs::read_to_string(features)
        .map_err(|e| format!("read {}: {e}", features.display()))?;
    let all = read_features_csv(&text).map_err(usage)?;
    let samples: Vec<LabeledSample> = all.into_iter().filter(|s| s.sensor == sensor).collect();
    if samples.is_empty() {
        return Err(format!("unknown sensor '{sensor}': no matching rows"));
    }
    let n_real = samples
        .iter()
        .filter(|s| s.label == crate::classify::Label::Real)
        .count();
    let n_fake = samples.len() - n_real;
    if n_real < 3 || n_fake < 3 {
        return Err(format!(
            "too few samples for sensor '{sensor}': {n_real} real / {n_fake} fake (need 3 each)"
        ));
    }
    let report = exhaustive_select(&samples).map_err(|e| {
        if matches!(e, crate::classify::ClassifyError::ZeroVariance) {
            format!(
                "{e}; a feature that is constant across every sample makes subsets of such \
                 features unevaluable — check the table for zero-variance columns"
            )
        } else {
            usage(e)
        }
    })?;
    write_text(out, &render_selection_text(&report, cfg.report.precision as usize))?;
    if let Some(p) = json_out {
        std::fs::write(p, render_selection_json(&report))
            .map_err(|e| format!("write {}: {e}", p.display()))?;
    }
    Ok(0)
}

fn cmd_evaluate(
    features: &Path,
    subset: &str,
    sensors: Option<&str>,
    out: Option<&Path>,
    json_out: Option<&Path>,
    config: Option<&Path>,
) -> Result<i32, String> {
    let cfg = ToolConfig::resolve(config).map_err(usage)?;
    let mask = SubsetMask::from_names(subset).map_err(usage)?;
    let text = std::fs::read_to_string(features)
        .map_err(|e| format!("read {}: {e}", features.display()))?;
    let all = read_features_csv(&text).map_err(usage)?;

    // Dataset order: explicit list, or first appearance in the table.
    let order: Vec<String> = match sensors {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => {
            let mut seen = Vec::new();
            for s in &all {
                if !seen.contains(&s.sensor) {
                    seen.push(s.sensor.clone());
                }
            }
            seen
        }
    };
    let mut datasets: Vec<(String, Vec<LabeledSample>)> = Vec::new();
    for sensor in &order {
        let rows: Vec<LabeledSample> =
            all.iter().filter(|s| &s.sensor == sensor).cloned().collect();
        if rows.is_empty() {
            return Err(format!("unknown sensor '{sensor}': no matching rows"));
        }
        datasets.push((sensor.clone(), rows));
    }
    // One subset applied to every dataset; the row is labeled with the
    // subset spelling rather than an owning sensor.
    let subsets = vec![(subset.to_string(), mask)];
    let report = cross_sensor_report(&datasets, &subsets).map_err(usage)?;
    write_text(out, &render_cross_sensor_text(&report, cfg.report.precision as usize))?;
    if let Some(p) = json_out {
        std::fs::write(p, render_cross_sensor_json(&report))
            .map_err(|e| format!("write {}: {e}", p.display()))?;
    }
    Ok(0)
}

fn cmd_segment(image: &Path, out: &Path, config: Option<&Path>) -> Result<i32, String> {
    let cfg = ToolConfig::resolve(config).map_err(usage)?;
    let bytes = std::fs::read(image).map_err(|e| format!("read {}: {e}", image.display()))?;
    let img = load_pgm(&bytes).map_err(usage)?;
    match segment(&img, &cfg.gabor_bank(), cfg.block_size) {
        Ok(mask) => {
            std::fs::write(out, save_pgm(&mask.to_debug_pgm()))
                .map_err(|e| format!("write {}: {e}", out.display()))?;
            Ok(0)
        }
        Err(SegmentationError::EmptyForeground) => {
            eprintln!("{}: empty foreground", image.display());
            Ok(1)
        }
        Err(e) => Err(usage(e)),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_synth(
    kind: &str,
    width: u32,
    height: u32,
    angle: f64,
    period: f64,
    amplitude: f64,
    noise_sigma: f64,
    seed: u64,
    blur_sigma: Option<f64>,
    out: &Path,
) -> Result<i32, String> {
    let kind: SynthKind = kind.parse().map_err(usage)?;
    let spec = SynthSpec {
        kind,
        width,
        height,
        angle_deg: angle,
        period,
        amplitude,
        noise_sigma,
        seed,
    };
    let mut img = generate(&spec).map_err(usage)?;
    if let Some(sigma) = blur_sigma {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(format!("blur sigma {sigma} must be finite and non-negative"));
        }
        img = gaussian_blur(&img, sigma);
    }
    std::fs::write(out, save_pgm(&img)).map_err(|e| format!("write {}: {e}", out.display()))?;
    Ok(0)
}

/// Runs one parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Extract {
            manifest,
            out,
            config,
        } => cmd_extract(manifest, out, config.as_deref()),
        Command::Select {
            features,
            sensor,
            out,
            json_out,
            config,
        } => cmd_select(
            features,
            sensor,
            out.as_deref(),
            json_out.as_deref(),
            config.as_deref(),
        ),
        Command::Evaluate {
            features,
            subset,
            sensors,
            out,
            json_out,
            config,
        } => cmd_evaluate(
            features,
            subset,
            sensors.as_deref(),
            out.as_deref(),
            json_out.as_deref(),
            config.as_deref(),
        ),
        Command::Segment { image, out, config } => {
            cmd_segment(image, out, config.as_deref())
        }
        Command::Synth {
            kind,
            width,
            height,
            angle,
            period,
            amplitude,
            noise_sigma,
            seed,
            blur_sigma,
            out,
        } => cmd_synth(
            kind,
            *width,
            *height,
            *angle,
            *period,
            *amplitude,
            *noise_sigma,
            *seed,
            *blur_sigma,
            out,
        ),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}
