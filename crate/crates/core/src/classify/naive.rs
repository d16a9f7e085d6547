//! Reference classification path: every leave-one-out trial refits from the
//! raw samples with two-pass means, explicitly centered covariances, a
//! Gauss–Jordan inverse, and direct Gaussian log-density evaluation. Slow
//! and deliberately independent of `engine.rs`; used as the correctness
//! oracle for the fast path.

use super::{
    ClassifyError, EvaluationResult, GaussianClassModel, Label, LabeledSample, SubsetMask,
};

/// Two-pass fit: means first, then centered scatter.
pub fn fit_lda_naive(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<GaussianClassModel, ClassifyError> {
    if subset.cardinality() == 0 {
        return Err(ClassifyError::InvalidSubset("empty subset".into()));
    }
    if let Some(first) = samples.first() {
        for s in &samples[1..] {
            if s.sensor != first.sensor {
                return Err(ClassifyError::MixedSensors {
                    a: first.sensor.clone(),
                    b: s.sensor.clone(),
                });
            }
        }
    }
    let idx: Vec<usize> = subset.indices().collect();
    let d = idx.len();
    let rows_of = |label: Label| -> Vec<Vec<f64>> {
        samples
            .iter()
            .filter(|s| s.label == label)
            .map(|s| {
                let full = s.features.as_array();
                idx.iter().map(|&i| full[i]).collect()
            })
            .collect()
    };
    let real_rows = rows_of(Label::Real);
    let fake_rows = rows_of(Label::Fake);
    if real_rows.len() < 2 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Real,
            count: real_rows.len(),
        });
    }
    if fake_rows.len() < 2 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Fake,
            count: fake_rows.len(),
        });
    }
    let mean = |rows: &[Vec<f64>]| -> Vec<f64> {
        let mut m = vec![0.0; d];
        for r in rows {
            for i in 0..d {
                m[i] += r[i];
            }
        }
        for v in &mut m {
            *v /= rows.len() as f64;
        }
        m
    };
    let mu_real = mean(&real_rows);
    let mu_fake = mean(&fake_rows);
    let scatter = |rows: &[Vec<f64>], mu: &[f64]| -> Vec<f64> {
        let mut s = vec![0.0; d * d];
        for r in rows {
            for i in 0..d {
                for j in 0..d {
                    s[i * d + j] += (r[i] - mu[i]) * (r[j] - mu[j]);
                }
            }
        }
        s
    };
    let s_real = scatter(&real_rows, &mu_real);
    let s_fake = scatter(&fake_rows, &mu_fake);
    let denom = (real_rows.len() + fake_rows.len() - 2) as f64;
    let sigma: Vec<f64> = s_real
        .iter()
        .zip(&s_fake)
        .map(|(a, b)| (a + b) / denom)
        .collect();
    let total = (real_rows.len() + fake_rows.len()) as f64;
    Ok(GaussianClassModel {
        subset,
        mu_real,
        mu_fake,
        sigma_pooled: sigma,
        prior_real: real_rows.len() as f64 / total,
        prior_fake: fake_rows.len() as f64 / total,
    })
}

/// Gauss–Jordan inverse with partial pivoting; `None` when singular to
/// working precision.
fn invert(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0f64; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    let scale = a
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..d {
        let pivot_row = (col..d)
            .max_by(|&r1, &r2| m[r1 * d + col].abs().total_cmp(&m[r2 * d + col].abs()))
            .unwrap();
        if m[pivot_row * d + col].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..d {
                m.swap(col * d + j, pivot_row * d + j);
                inv.swap(col * d + j, pivot_row * d + j);
            }
        }
        let p = m[col * d + col];
        for j in 0..d {
            m[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = m[r * d + col];
            if f != 0.0 {
                for j in 0..d {
                    m[r * d + j] -= f * m[col * d + j];
                    inv[r * d + j] -= f * inv[col * d + j];
                }
            }
        }
    }
    Some(inv)
}

/// Explicit Gaussian log-density prediction: inverts the pooled covariance
/// (with the same ridge fallback contract as the fast path) and compares
/// class log densities including priors.
pub fn predict_naive(
    model: &GaussianClassModel,
    features: &crate::features::FeatureVector,
) -> Result<(Label, f64), ClassifyError> {
    let d = model.mu_real.len();
    let inv = match invert(&model.sigma_pooled, d) {
        Some(m) => m,
        None => {
            let trace: f64 = (0..d).map(|i| model.sigma_pooled[i * d + i]).sum();
            let eps = 1e-6 * trace / d as f64;
            let mut ridged = model.sigma_pooled.clone();
            for i in 0..d {
                ridged[i * d + i] += eps;
            }
            invert(&ridged, d).ok_or(ClassifyError::ZeroVariance)?
        }
    };
    let full = features.as_array();
    let x: Vec<f64> = model.subset.indices().map(|i| full[i]).collect();
    let mahal = |mu: &[f64]| -> f64 {
        let diff: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += diff[i] * inv[i * d + j] * diff[j];
            }
        }
        q
    };
    let log_real = model.prior_real.ln() - 0.5 * mahal(&model.mu_real);
    let log_fake = model.prior_fake.ln() - 0.5 * mahal(&model.mu_fake);
    let peak = log_real.max(log_fake);
    let er = (log_real - peak).exp();
    let ef = (log_fake - peak).exp();
    let posterior_real = er / (er + ef);
    let label = if (posterior_real - 0.5).abs() <= 1e-12 || posterior_real < 0.5 {
        Label::Fake
    } else {
        Label::Real
    };
    Ok((label, posterior_real))
}

/// Leave-one-out by refitting from scratch on every trial.
pub fn loo_evaluate_naive(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<EvaluationResult, ClassifyError> {
    let (result, _) = loo_decisions_naive(samples, subset)?;
    Ok(result)
}

/// Per-trial decisions plus the confusion summary, refitting every trial.
pub fn loo_decisions_naive(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<(EvaluationResult, Vec<Label>), ClassifyError> {
    let n_real = samples.iter().filter(|s| s.label == Label::Real).count();
    let n_fake = samples.len() - n_real;
    if n_real < 3 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Real,
            count: n_real,
        });
    }
    if n_fake < 3 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Fake,
            count: n_fake,
        });
    }
    let mut decisions = Vec::with_capacity(samples.len());
    let mut fake_as_real = 0u64;
    let mut real_as_fake = 0u64;
    for i in 0..samples.len() {
        let mut training: Vec<LabeledSample> = Vec::with_capacity(samples.len() - 1);
        training.extend(samples[..i].iter().cloned());
        training.extend(samples[i + 1..].iter().cloned());
        let model = fit_lda_naive(&training, subset)?;
        let (decision, _) = predict_naive(&model, &samples[i].features)?;
        match (samples[i].label, decision) {
            (Label::Fake, Label::Real) => fake_as_real += 1,
            (Label::Real, Label::Fake) => real_as_fake += 1,
            _ => {}
        }
        decisions.push(decision);
    }
    let far = 100.0 * fake_as_real as f64 / n_fake as f64;
    let frr = 100.0 * real_as_fake as f64 / n_real as f64;
    Ok((
        EvaluationResult {
            far,
            frr,
            ace: super::compute_ace(far, frr),
            n_real,
            n_fake,
        },
        decisions,
    ))
}
