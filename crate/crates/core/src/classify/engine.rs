//! Fast classification path: global per-class sufficient statistics with a
//! rank-one downdate per leave-one-out trial, so the 1023-subset search
//! never refits from raw samples. Verified against the naive refit path in
//! `naive.rs`.

use super::{
    ClassifyError, EvaluationResult, GaussianClassModel, Label, LabeledSample, SubsetMask,
};

pub(crate) const MAX_D: usize = 10;

/// Raw per-class moments over the full 10-dimensional feature space:
/// count, Σx, and Σxxᵀ.
#[derive(Debug, Clone)]
pub(crate) struct ClassStats {
    pub n: usize,
    pub sum: [f64; MAX_D],
    pub raw: [[f64; MAX_D]; MAX_D],
}

impl ClassStats {
    fn new() -> Self {
        Self {
            n: 0,
            sum: [0.0; MAX_D],
            raw: [[0.0; MAX_D]; MAX_D],
        }
    }

    fn add(&mut self, x: &[f64; MAX_D]) {
        self.n += 1;
        for i in 0..MAX_D {
            self.sum[i] += x[i];
            for j in 0..MAX_D {
                self.raw[i][j] += x[i] * x[j];
            }
        }
    }
}

/// Full-feature sufficient statistics plus the per-sample matrix, computed
/// once per dataset and shared read-only by every subset evaluation.
#[derive(Debug, Clone)]
pub(crate) struct DatasetStats {
    pub real: ClassStats,
    pub fake: ClassStats,
    pub rows: Vec<[f64; MAX_D]>,
    pub labels: Vec<Label>,
}

pub(crate) fn build_stats(samples: &[LabeledSample]) -> Result<DatasetStats, ClassifyError> {
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
    let mut real = ClassStats::new();
    let mut fake = ClassStats::new();
    let mut rows = Vec::with_capacity(samples.len());
    let mut labels = Vec::with_capacity(samples.len());
    for s in samples {
        let x = s.features.as_array();
        match s.label {
            Label::Real => real.add(&x),
            Label::Fake => fake.add(&x),
        }
        rows.push(x);
        labels.push(s.label);
    }
    Ok(DatasetStats {
        real,
        fake,
        rows,
        labels,
    })
}

/// Cholesky factorization of a symmetric matrix stored row-major in `a`
/// (d×d, only the lower triangle is read). Returns the lower factor, or
/// `None` when a pivot falls below `tol` (singular to working precision).
fn cholesky(a: &[f64], d: usize, tol: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; d * d];
    for j in 0..d {
        let mut diag = a[j * d + j];
        for k in 0..j {
            diag -= l[j * d + k] * l[j * d + k];
        }
        if !(diag > tol) {
            return None;
        }
        let root = diag.sqrt();
        l[j * d + j] = root;
        for i in j + 1..d {
            let mut v = a[i * d + j];
            for k in 0..j {
                v -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = v / root;
        }
    }
    Some(l)
}

/// Solves L Lᵀ x = b in place.
fn cholesky_solve(l: &[f64], d: usize, b: &mut [f64]) {
    for i in 0..d {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i * d + k] * b[k];
        }
        b[i] = v / l[i * d + i];
    }
    for i in (0..d).rev() {
        let mut v = b[i];
        for k in i + 1..d {
            v -= l[k * d + i] * b[k];
        }
        b[i] = v / l[i * d + i];
    }
}

fn max_diag(a: &[f64], d: usize) -> f64 {
    (0..d).fold(0.0f64, |m, i| m.max(a[i * d + i].abs()))
}

/// Factors the pooled covariance, applying the ridge fallback once when the
/// matrix is singular to working precision.
pub(crate) fn factor_pooled(sigma: &[f64], d: usize) -> Result<Vec<f64>, ClassifyError> {
    let tol = 1e-12 * max_diag(sigma, d).max(f64::MIN_POSITIVE);
    if let Some(l) = cholesky(sigma, d, tol) {
        return Ok(l);
    }
    let trace: f64 = (0..d).map(|i| sigma[i * d + i]).sum();
    let eps = 1e-6 * trace / d as f64;
    let mut ridged = sigma.to_vec();
    for i in 0..d {
        ridged[i * d + i] += eps;
    }
    let ridged_tol = 1e-12 * max_diag(&ridged, d).max(f64::MIN_POSITIVE);
    cholesky(&ridged, d, ridged_tol).ok_or(ClassifyError::ZeroVariance)
}

/// Linear-score machinery shared by fitting and prediction: w = Σ⁻¹(μr−μf),
/// bias = −½(μr+μf)ᵀw + ln(πr/πf).
pub(crate) fn discriminant(
    mu_real: &[f64],
    mu_fake: &[f64],
    sigma: &[f64],
    prior_real: f64,
    prior_fake: f64,
    d: usize,
) -> Result<(Vec<f64>, f64), ClassifyError> {
    let l = factor_pooled(sigma, d)?;
    let mut w: Vec<f64> = (0..d).map(|i| mu_real[i] - mu_fake[i]).collect();
    cholesky_solve(&l, d, &mut w);
    let mut bias = (prior_real / prior_fake).ln();
    for i in 0..d {
        bias -= 0.5 * (mu_real[i] + mu_fake[i]) * w[i];
    }
    Ok((w, bias))
}

/// Projected per-class statistics for one subset: means and centered
/// scatter matrices in subset space, derived from the full-space moments.
struct Projected {
    d: usize,
    idx: Vec<usize>,
    n_real: usize,
    n_fake: usize,
    sum_real: Vec<f64>,
    sum_fake: Vec<f64>,
    raw_real: Vec<f64>,
    raw_fake: Vec<f64>,
    x: Vec<f64>, // n×d row-major projected samples
}

fn project(stats: &DatasetStats, subset: SubsetMask) -> Projected {
    let idx: Vec<usize> = subset.indices().collect();
    let d = idx.len();
    let gather_vec = |v: &[f64; MAX_D]| -> Vec<f64> { idx.iter().map(|&i| v[i]).collect() };
    let gather_mat = |m: &[[f64; MAX_D]; MAX_D]| -> Vec<f64> {
        let mut out = vec![0.0; d * d];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[a * d + b] = m[i][j];
            }
        }
        out
    };
    let mut x = Vec::with_capacity(stats.rows.len() * d);
    for row in &stats.rows {
        for &i in &idx {
            x.push(row[i]);
        }
    }
    let sum_real = gather_vec(&stats.real.sum);
    let sum_fake = gather_vec(&stats.fake.sum);
    let raw_real = gather_mat(&stats.real.raw);
    let raw_fake = gather_mat(&stats.fake.raw);
    Projected {
        d,
        idx,
        n_real: stats.real.n,
        n_fake: stats.fake.n,
        sum_real,
        sum_fake,
        raw_real,
        raw_fake,
        x,
    }
}

/// Builds the pooled-covariance model for one training configuration given
/// raw moments (Σx, Σxxᵀ, n) per class already in subset space.
#[allow(clippy::too_many_arguments)]
fn model_from_moments(
    subset: SubsetMask,
    d: usize,
    n_real: usize,
    n_fake: usize,
    sum_real: &[f64],
    sum_fake: &[f64],
    raw_real: &[f64],
    raw_fake: &[f64],
) -> Result<GaussianClassModel, ClassifyError> {
    if n_real < 2 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Real,
            count: n_real,
        });
    }
    if n_fake < 2 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Fake,
            count: n_fake,
        });
    }
    let (nr, nf) = (n_real as f64, n_fake as f64);
    let mu_real: Vec<f64> = sum_real.iter().map(|s| s / nr).collect();
    let mu_fake: Vec<f64> = sum_fake.iter().map(|s| s / nf).collect();
    // Centered scatter: Σxxᵀ − n μμᵀ, pooled over classes with the usual
    // (n₁ + n₂ − 2) denominator.
    let mut sigma = vec![0.0f64; d * d];
    let denom = nr + nf - 2.0;
    for i in 0..d {
        for j in 0..d {
            let sr = raw_real[i * d + j] - nr * mu_real[i] * mu_real[j];
            let sf = raw_fake[i * d + j] - nf * mu_fake[i] * mu_fake[j];
            sigma[i * d + j] = (sr + sf) / denom;
        }
    }
    // Enforce exact symmetry against floating-point drift.
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (sigma[i * d + j] + sigma[j * d + i]);
            sigma[i * d + j] = v;
            sigma[j * d + i] = v;
        }
    }
    let total = nr + nf;
    Ok(GaussianClassModel {
        subset,
        mu_real,
        mu_fake,
        sigma_pooled: sigma,
        prior_real: nr / total,
        prior_fake: nf / total,
    })
}

pub(crate) fn fit_lda_impl(
    samples: &[LabeledSample],
    subset: SubsetMask,
) -> Result<GaussianClassModel, ClassifyError> {
    let stats = build_stats(samples)?;
    let p = project(&stats, subset);
    model_from_moments(
        subset,
        p.d,
        p.n_real,
        p.n_fake,
        &p.sum_real,
        &p.sum_fake,
        &p.raw_real,
        &p.raw_fake,
    )
}

/// Leave-one-out over one subset using moment downdates. Returns the
/// confusion summary plus the per-sample decisions in input order.
pub(crate) fn loo_with_stats(
    stats: &DatasetStats,
    subset: SubsetMask,
) -> Result<(EvaluationResult, Vec<Label>), ClassifyError> {
    let n = stats.rows.len();
    if stats.real.n < 3 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Real,
            count: stats.real.n,
        });
    }
    if stats.fake.n < 3 {
        return Err(ClassifyError::DegenerateTraining {
            label: Label::Fake,
            count: stats.fake.n,
        });
    }
    let p = project(stats, subset);
    let d = p.d;
    let mut decisions = Vec::with_capacity(n);
    let mut fake_as_real = 0u64;
    let mut real_as_fake = 0u64;
    let mut sum = vec![0.0f64; d];
    let mut raw = vec![0.0f64; d * d];
    for t in 0..n {
        let x = &p.x[t * d..(t + 1) * d];
        let held = stats.labels[t];
        // Downdate the held-out sample's class; the other class is intact.
        let (n_real, n_fake, sum_real, sum_fake, raw_real, raw_fake) = match held {
            Label::Real => {
                for i in 0..d {
                    sum[i] = p.sum_real[i] - x[i];
                    for j in 0..d {
                        raw[i * d + j] = p.raw_real[i * d + j] - x[i] * x[j];
                    }
                }
                (
                    p.n_real - 1,
                    p.n_fake,
                    &sum[..],
                    &p.sum_fake[..],
                    &raw[..],
                    &p.raw_fake[..],
                )
            }
            Label::Fake => {
                for i in 0..d {
                    sum[i] = p.sum_fake[i] - x[i];
                    for j in 0..d {
                        raw[i * d + j] = p.raw_fake[i * d + j] - x[i] * x[j];
                    }
                }
                (
                    p.n_real,
                    p.n_fake - 1,
                    &p.sum_real[..],
                    &sum[..],
                    &p.raw_real[..],
                    &raw[..],
                )
            }
        };
        let model = model_from_moments(
            subset, d, n_real, n_fake, sum_real, sum_fake, raw_real, raw_fake,
        )?;
        let (decision, _) = super::predict(&model, &row_features(&p.idx, x))?;
        match (held, decision) {
            (Label::Fake, Label::Real) => fake_as_real += 1,
            (Label::Real, Label::Fake) => real_as_fake += 1,
            _ => {}
        }
        decisions.push(decision);
    }
    let far = 100.0 * fake_as_real as f64 / stats.fake.n as f64;
    let frr = 100.0 * real_as_fake as f64 / stats.real.n as f64;
    Ok((
        EvaluationResult {
            far,
            frr,
            ace: super::compute_ace(far, frr),
            n_real: stats.real.n,
            n_fake: stats.fake.n,
        },
        decisions,
    ))
}

/// Re-embeds a projected row into a full feature array so the public
/// `predict` signature (which projects by subset) can be reused verbatim.
fn row_features(idx: &[usize], x: &[f64]) -> crate::features::FeatureVector {
    let mut full = [0.0f64; MAX_D];
    for (a, &i) in idx.iter().enumerate() {
        full[i] = x[a];
    }
    crate::features::FeatureVector::from_array(full)
}
