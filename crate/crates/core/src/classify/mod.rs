//! Two-class Gaussian classification with a shared (pooled) covariance,
//! leave-one-out evaluation, FAR/FRR/ACE metrics, exhaustive subset
//! selection over the ten features, and cross-sensor report assembly.
//!
//! Two independent evaluation paths exist: the fast sufficient-statistics
//! engine used everywhere, and a naive refit path (`naive`) kept solely as
//! a correctness oracle.

mod engine;
pub mod naive;

use crate::features::{FeatureVector, FEATURE_NAMES};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Ground-truth or predicted class of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Fake => "fake",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Label::Real),
            "fake" => Ok(Label::Fake),
            other => Err(ClassifyError::BadLabel(other.to_string())),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One feature-extracted sample. `material` is carried for reporting only
/// and never participates in any computation.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub id: String,
    pub sensor: String,
    pub label: Label,
    pub material: Option<String>,
    pub features: FeatureVector,
}

/// A non-empty subset of the ten features. Bit `i` corresponds to feature
/// `i` in canonical order, so the mask prints as a 10-character bit string
/// with Q_OCL leftmost (e.g. `0100010000` = {Q_E, Q_STD}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetMask(u16);

pub const ALL_FEATURES: SubsetMask = SubsetMask(0x3ff);

impl SubsetMask {
    pub fn from_bits(bits: u16) -> Result<Self, ClassifyError> {
        if bits == 0 || bits > 0x3ff {
            return Err(ClassifyError::InvalidSubset(format!(
                "mask {bits:#x} outside 1..=0x3ff"
            )));
        }
        Ok(SubsetMask(bits))
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self, ClassifyError> {
        let mut bits = 0u16;
        for &i in indices {
            if i >= 10 {
                return Err(ClassifyError::InvalidSubset(format!(
                    "feature index {i} out of range"
                )));
            }
            bits |= 1 << i;
        }
        Self::from_bits(bits)
    }

    /// Parses a comma-separated list of canonical feature names.
    pub fn from_names(names: &str) -> Result<Self, ClassifyError> {
        let mut bits = 0u16;
        for raw in names.split(',') {
            let name = raw.trim();
            match FEATURE_NAMES.iter().position(|&n| n.eq_ignore_ascii_case(name)) {
                Some(i) => bits |= 1 << i,
                None => return Err(ClassifyError::BadFeatureName(name.to_string())),
            }
        }
        Self::from_bits(bits)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 10 && self.0 & (1 << index) != 0
    }

    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..10usize).filter(move |i| bits & (1 << i) != 0)
    }

    /// Selected feature names, canonical order.
    pub fn names(self) -> Vec<&'static str> {
        self.indices().map(|i| FEATURE_NAMES[i]).collect()
    }

    /// Projects a feature vector onto the selected components.
    pub fn project(self, features: &FeatureVector) -> Vec<f64> {
        let full = features.as_array();
        self.indices().map(|i| full[i]).collect()
    }

    /// All 1023 non-empty subsets, ascending by raw bits.
    pub fn all_subsets() -> impl Iterator<Item = SubsetMask> {
        (1u16..=0x3ff).map(SubsetMask)
    }

    /// Key under which bit strings compare lexicographically with the
    /// first feature as the most significant position.
    fn lex_key(self) -> u16 {
        self.0.reverse_bits() >> 6
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..10 {
            f.write_str(if self.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Pooled-covariance two-class Gaussian model over one feature subset.
#[derive(Debug, Clone)]
pub struct GaussianClassModel {
    pub subset: SubsetMask,
    pub mu_real: Vec<f64>,
    pub mu_fake: Vec<f64>,
    /// d×d row-major, symmetric.
    pub sigma_pooled: Vec<f64>,
    pub prior_real: f64,
    pub prior_fake: f64,
}

impl GaussianClassModel {
    /// Assembles a model from explicit parameters (e.g. known ground-truth
    /// Gaussians in calibration tests).
    pub fn from_parts(
        subset: SubsetMask,
        mu_real: Vec<f64>,
        mu_fake: Vec<f64>,
        sigma_pooled: Vec<f64>,
        prior_real: f64,
    ) -> Result<Self, ClassifyError> {
        let d = subset.cardinality() as usize;
        if mu_real.len() != d || mu_fake.len() != d || sigma_pooled.len() != d * d {
            return Err(ClassifyError::InvalidSubset(format!(
                "parameter dimensions do not match subset cardinality {d}"
            )));
        }
        if !(prior_real > 0.0 && prior_real < 1.0) {
            return Err(ClassifyError::InvalidSubset(format!(
                "prior_real {prior_real} outside (0,1)"
            )));
        }
        let scale = sigma_pooled
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..i {
                if (sigma_pooled[i * d + j] - sigma_pooled[j * d + i]).abs() > 1e-9 * scale {
                    return Err(ClassifyError::InvalidSubset(
                        "covariance matrix not symmetric".into(),
                    ));
                }
            }
        }
        Ok(Self {
            subset,
            mu_real,
            mu_fake,
            sigma_pooled,
            prior_real,
            prior_fake: 1.0 - prior_real,
        })
    }
}

/// Leave-one-out confusion summary, rates in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationResult {
    /// Percent of fake samples accepted as real.
    pub far: f64,
    /// Percent of real samples rejected as fake.
    pub frr: f64,
    /// (far + frr) / 2.
    pub ace: f64,
    pub n_real: usize,
    pub n_fake: usize,
}

/// One evaluated subset with its leave-one-out summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetScore {
    pub subset: SubsetMask,
    pub result: EvaluationResult,
}

/// Outcome of the exhaustive subset search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    /// Best subset at each cardinality 1..=k_max, ascending.
    pub per_cardinality: Vec<SubsetScore>,
    /// Overall winner across every evaluated subset.
    pub best: SubsetScore,
    /// Number of subsets evaluated (1023 for the full 10-feature space).
    pub n_evaluated: usize,
}

/// One row of the cross-sensor table: a chosen subset evaluated on every
/// dataset, plus the unweighted TOTAL means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSensorRow {
    pub subset_sensor: String,
    pub subset: SubsetMask,
    /// One cell per dataset, in report dataset order.
    pub cells: Vec<EvaluationResult>,
    pub total_far: f64,
    pub total_frr: f64,
    pub total_ace: f64,
}

/// Cross-sensor evaluation: each sensor's chosen subset applied to every
/// dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSensorReport {
    pub dataset_sensors: Vec<String>,
    pub rows: Vec<CrossSensorRow>,
    /// Mean of each dataset's own-subset ACE (the diagonal), when every
    /// subset sensor has a matching dataset.
    pub own_subset_mean_ace: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("class '{label}' has {count} training samples (needs at least 2, 3 for leave-one-out)")]
    DegenerateTraining { label: Label, count: usize },
    #[error("pooled covariance singular even after ridge regularization")]
    ZeroVariance,
    #[error("samples mix sensors '{a}' and '{b}'")]
    MixedSensors { a: String, b: String },
    #[error("invalid feature subset: {0}")]
    InvalidSubset(String),
    #[error("unknown feature name '{0}'")]
    BadFeatureName(String),
    #[error("unknown label '{0}' (expected 'real' or 'fake')")]
    BadLabel(String),
    #[error("cross-sensor report needs at least one dataset and one subset")]
    EmptyReport,
}

/// Average classification error: the arithmetic mean of FAR and FRR.
pub fn compute_ace(far: f64, frr: f64) -> f64 {
    debug_assert!((0.0..=100.0).contains(&far) && (0.0..=100.0).contains(&frr));
    (far + frr) / 2.0
}

/// Fits the pooled-covariance model on the selected features.
pub fn fit_lda(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<GaussianClassModel, ClassifyError> {
    engine::fit_lda_impl(samples, subset)
}

/// Classifies one feature vector: posterior probability of the real class
/// under the two shared-covariance Gaussians, exact ties going to fake.
pub fn predict(
    model: &GaussianClassModel,
    features: &FeatureVector,
) -> Result<(Label, f64), ClassifyError> {
    let d = model.mu_real.len();
    let (w, bias) = engine::discriminant(
        &model.mu_real,
        &model.mu_fake,
        &model.sigma_pooled,
        model.prior_real,
        model.prior_fake,
        d,
    )?;
    let full = features.as_array();
    let score = model
        .subset
        .indices()
        .zip(&w)
        .fold(bias, |acc, (i, wi)| acc + wi * full[i]);
    let posterior_real = 1.0 / (1.0 + (-score).exp());
    let label = if (posterior_real - 0.5).abs() <= 1e-12 || posterior_real < 0.5 {
        Label::Fake
    } else {
        Label::Real
    };
    Ok((label, posterior_real))
}

/// Leave-one-out evaluation of one subset on a single-sensor dataset.
pub fn loo_evaluate(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<EvaluationResult, ClassifyError> {
    let stats = engine::build_stats(samples)?;
    engine::loo_with_stats(&stats, subset).map(|(result, _)| result)
}

/// Leave-one-out per-sample decisions (input order) plus the summary.
pub fn loo_decisions(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<(EvaluationResult, Vec<Label>), ClassifyError> {
    let stats = engine::build_stats(samples)?;
    engine::loo_with_stats(&stats, subset)
}

fn beats(a: &SubsetScore, b: &SubsetScore) -> bool {
    if a.result.ace != b.result.ace {
        return a.result.ace < b.result.ace;
    }
    if a.subset.cardinality() != b.subset.cardinality() {
        return a.subset.cardinality() < b.subset.cardinality();
    }
    a.subset.lex_key() < b.subset.lex_key()
}

/// Exhaustively evaluates every non-empty subset of the ten features.
pub fn exhaustive_select(samples: &[LabeledSample]) -> Result<SelectionReport, ClassifyError> {
    exhaustive_select_within(samples, ALL_FEATURES)
}

/// Exhaustive search restricted to subsets of `allowed` (2^k − 1 subsets
/// for an allowed set of k features).
pub fn exhaustive_select_within(
    samples: &[LabeledSample],
    allowed: SubsetMask,
) -> Result<SelectionReport, ClassifyError> {
    let stats = engine::build_stats(samples)?;
    let k_max = allowed.cardinality() as usize;
    let mut per_cardinality: Vec<Option<SubsetScore>> = vec![None; k_max];
    let mut best: Option<SubsetScore> = None;
    let mut n_evaluated = 0usize;
    // Standard submask walk: enumerates every non-empty submask of
    // `allowed` exactly once.
    let allowed_bits = allowed.bits();
    let mut bits = allowed_bits;
    loop {
        let subset = SubsetMask(bits);
        let (result, _) = engine::loo_with_stats(&stats, subset)?;
        n_evaluated += 1;
        let score = SubsetScore { subset, result };
        let slot = &mut per_cardinality[subset.cardinality() as usize - 1];
        if slot.map_or(true, |cur| beats(&score, &cur)) {
            *slot = Some(score);
        }
        if best.map_or(true, |cur| beats(&score, &cur)) {
            best = Some(score);
        }
        if bits == 0 {
            unreachable!();
        }
        bits = (bits - 1) & allowed_bits;
        if bits == 0 {
            break;
        }
    }
    Ok(SelectionReport {
        per_cardinality: per_cardinality.into_iter().map(|s| s.unwrap()).collect(),
        best: best.unwrap(),
        n_evaluated,
    })
}

/// Evaluates each sensor's chosen subset on every dataset. TOTAL columns
/// are unweighted means over datasets; the own-subset aggregate averages
/// the diagonal (each dataset scored with its own sensor's subset).
pub fn cross_sensor_report(
    datasets: &[(String, Vec<LabeledSample>)],
    subsets: &[(String, SubsetMask)],
) -> Result<CrossSensorReport, ClassifyError> {
    if datasets.is_empty() || subsets.is_empty() {
        return Err(ClassifyError::EmptyReport);
    }
    let stats: Vec<engine::DatasetStats> = datasets
        .iter()
        .map(|(_, samples)| engine::build_stats(samples))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(subsets.len());
    let mut diagonal = Vec::new();
    for (sensor, subset) in subsets {
        let mut cells = Vec::with_capacity(datasets.len());
        for s in &stats {
            let (result, _) = engine::loo_with_stats(s, *subset)?;
            cells.push(result);
        }
        let n = cells.len() as f64;
        let total_far = cells.iter().map(|c| c.far).sum::<f64>() / n;
        let total_frr = cells.iter().map(|c| c.frr).sum::<f64>() / n;
        let total_ace = cells.iter().map(|c| c.ace).sum::<f64>() / n;
        if let Some(pos) = datasets.iter().position(|(name, _)| name == sensor) {
            diagonal.push(cells[pos].ace);
        }
        rows.push(CrossSensorRow {
            subset_sensor: sensor.clone(),
            subset: *subset,
            cells,
            total_far,
            total_frr,
            total_ace,
        });
    }
    let own_subset_mean_ace = if diagonal.len() == subsets.len() {
        Some(diagonal.iter().sum::<f64>() / diagonal.len() as f64)
    } else {
        None
    };
    Ok(CrossSensorReport {
        dataset_sensors: datasets.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        own_subset_mean_ace,
    })
}
