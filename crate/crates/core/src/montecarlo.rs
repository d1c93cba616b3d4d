//! Seeded, parallel ensemble estimators.
//!
//! Sample `i` always draws its field from stream `i` of the run seed, and
//! samples are grouped into fixed index batches whose partial results are
//! combined in batch order. Results therefore depend on `(seed, samples, N)`
//! only, never on the worker count.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::WindingDistribution;
use crate::ensemble::{sample_stream, ParametricField};
use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::spectral::{
    circle_spectrum_with, winding_contour, winding_density, winding_from_count, ContourGrid,
    WindingSample, DEFAULT_CONDITION_THRESHOLD, DEFAULT_EPSILON_CIRCLE,
};

/// Rejected fraction above which results carry a warning.
pub const REJECTION_WARNING_FRACTION: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub epsilon_circle: f64,
    pub condition_threshold: f64,
}

impl RunConfig {
    /// Single worker and default numerical thresholds.
    pub fn new(n: usize, samples: u64, seed: u64) -> Self {
        Self {
            n,
            samples,
            seed,
            workers: 1,
            epsilon_circle: DEFAULT_EPSILON_CIRCLE,
            condition_threshold: DEFAULT_CONDITION_THRESHOLD,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        if !(self.epsilon_circle >= 0.0 && self.epsilon_circle.is_finite()) {
            return Err(Error::InvalidArgument("epsilon_circle must be finite and >= 0".into()));
        }
        if !(self.condition_threshold > 1.0) {
            return Err(Error::InvalidArgument("condition_threshold must exceed 1".into()));
        }
        Ok(())
    }
}

/// Draws excluded from an estimate, by cause.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejections {
    pub near_unit_circle: u64,
    pub ill_conditioned: u64,
    pub singular_field: u64,
    pub no_convergence: u64,
}

impl Rejections {
    pub fn total(&self) -> u64 {
        self.near_unit_circle + self.ill_conditioned + self.singular_field + self.no_convergence
    }

    fn merge(&mut self, other: &Rejections) {
        self.near_unit_circle += other.near_unit_circle;
        self.ill_conditioned += other.ill_conditioned;
        self.singular_field += other.singular_field;
        self.no_convergence += other.no_convergence;
    }

    fn record(&mut self, err: &Error) {
        match err {
            Error::IllConditioned { .. } => self.ill_conditioned += 1,
            Error::SingularField { .. } => self.singular_field += 1,
            _ => self.no_convergence += 1,
        }
    }
}

fn rejection_warning(rejected: u64, samples: u64) -> Option<String> {
    let fraction = rejected as f64 / samples as f64;
    (fraction > REJECTION_WARNING_FRACTION).then(|| {
        format!(
            "{rejected} of {samples} draws rejected ({:.2}%); check epsilon_circle and condition_threshold",
            100.0 * fraction
        )
    })
}

/// Splits `0..samples` into `max(1, floor(sqrt(samples)))` consecutive
/// batches whose sizes differ by at most one.
fn batches(samples: u64) -> Vec<Range<u64>> {
    let count = ((samples as f64).sqrt().floor() as u64).max(1);
    let base = samples / count;
    let extra = samples % count;
    let mut start = 0;
    (0..count)
        .map(|b| {
            let len = base + u64::from(b < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Maps every batch on a pool of `workers` threads, returning results in
/// batch order.
fn map_batches<T, F>(cfg: &RunConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let ranges = batches(cfg.samples);
    Ok(pool.install(|| ranges.into_par_iter().map(f).collect()))
}

fn draw_field(cfg: &RunConfig, index: u64) -> ParametricField {
    ParametricField::sample(cfg.n, &mut sample_stream(cfg.seed, index))
}

/// Winding number of sample `index` by eigenvalue counting, or the reason it
/// was rejected.
fn count_sample(cfg: &RunConfig, field: &ParametricField) -> std::result::Result<WindingSample, Rejections> {
    let mut rej = Rejections::default();
    match circle_spectrum_with(field, cfg.condition_threshold) {
        Ok(spec) => {
            let s = winding_from_count(&spec, cfg.epsilon_circle);
            if s.flags.near_unit_circle {
                rej.near_unit_circle += 1;
                Err(rej)
            } else {
                Ok(s)
            }
        }
        Err(e) => {
            rej.record(&e);
            Err(rej)
        }
    }
}

/// Agreement of the contour evaluator with the eigenvalue count on retained
/// draws.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourCheck {
    pub checked: u64,
    pub agreed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionEstimate {
    pub distribution: WindingDistribution,
    /// Counts indexed by `W + N`.
    pub counts: Vec<u64>,
    /// Binomial standard error of each bin, indexed by `W + N`.
    pub stderr: Vec<f64>,
    pub accepted: u64,
    pub rejections: Rejections,
    pub contour: Option<ContourCheck>,
    pub warning: Option<String>,
}

impl DistributionEstimate {
    pub fn stderr_at(&self, w: i64) -> f64 {
        let idx = w + self.distribution.n() as i64;
        if idx < 0 || idx as usize >= self.stderr.len() {
            0.0
        } else {
            self.stderr[idx as usize]
        }
    }
}

#[derive(Default)]
struct DistributionBatch {
    counts: Vec<u64>,
    rejections: Rejections,
    contour: ContourCheck,
}

/// Empirical `P(W)` from eigenvalue counting. Draws flagged near the unit
/// circle or failing the condition screen are excluded and counted.
pub fn estimate_distribution(cfg: &RunConfig) -> Result<DistributionEstimate> {
    distribution_impl(cfg, None)
}

/// As [`estimate_distribution`], additionally evaluating every retained draw
/// with the contour evaluator and recording agreement.
pub fn estimate_distribution_with_contour(
    cfg: &RunConfig,
    grid: &ContourGrid,
) -> Result<DistributionEstimate> {
    distribution_impl(cfg, Some(grid))
}

fn distribution_impl(cfg: &RunConfig, grid: Option<&ContourGrid>) -> Result<DistributionEstimate> {
    cfg.validate()?;
    let n = cfg.n;
    let parts = map_batches(cfg, |range| {
        let mut b = DistributionBatch {
            counts: vec![0; 2 * n + 1],
            ..Default::default()
        };
        for i in range {
            let field = draw_field(cfg, i);
            match count_sample(cfg, &field) {
                Ok(s) => {
                    b.counts[(s.w + n as i64) as usize] += 1;
                    if let Some(g) = grid {
                        b.contour.checked += 1;
                        match winding_contour(&field, g) {
                            Ok(w) if w == s.w => b.contour.agreed += 1,
                            Ok(_) => {}
                            Err(_) => b.contour.failed += 1,
                        }
                    }
                }
                Err(r) => b.rejections.merge(&r),
            }
        }
        b
    })?;

    let mut counts = vec![0u64; 2 * n + 1];
    let mut rejections = Rejections::default();
    let mut contour = ContourCheck::default();
    for p in &parts {
        for (c, x) in counts.iter_mut().zip(&p.counts) {
            *c += x;
        }
        rejections.merge(&p.rejections);
        contour.checked += p.contour.checked;
        contour.agreed += p.contour.agreed;
        contour.failed += p.contour.failed;
    }
    let accepted: u64 = counts.iter().sum();
    if accepted == 0 {
        return Err(Error::InvalidArgument(format!(
            "all {} draws were rejected",
            cfg.samples
        )));
    }
    let distribution = WindingDistribution::from_counts(n, &counts)?;
    let stderr = distribution
        .as_slice()
        .iter()
        .map(|&p| (p * (1.0 - p) / accepted as f64).sqrt())
        .collect();
    Ok(DistributionEstimate {
        distribution,
        counts,
        stderr,
        accepted,
        rejections,
        contour: grid.map(|_| contour),
        warning: rejection_warning(rejections.total(), cfg.samples),
    })
}

/// Empirical correlators `<w(p_1) ... w(p_k)>` on a list of `k`-tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationGrid {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub mean: Vec<C64>,
    /// Batch-means standard error of the real part.
    pub stderr: Vec<f64>,
    /// Batch-means standard error of the imaginary part.
    pub stderr_im: Vec<f64>,
    pub samples_used: u64,
    pub samples_rejected: u64,
    pub rejections: Rejections,
    pub warning: Option<String>,
}

struct CorrelationBatch {
    sums: Vec<C64>,
    used: u64,
    rejections: Rejections,
}

/// Batch-means standard error of a ratio estimate `sum / count` from
/// per-batch sums and counts.
fn batch_means_stderr(sums: &[f64], counts: &[u64]) -> f64 {
    let populated: Vec<(f64, f64)> = sums
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&s, &c)| (s, c as f64))
        .collect();
    let b = populated.len();
    if b < 2 {
        return f64::INFINITY;
    }
    let total: f64 = populated.iter().map(|x| x.0).sum();
    let count: f64 = populated.iter().map(|x| x.1).sum();
    let mean = total / count;
    let cbar = count / b as f64;
    let ss: f64 = populated
        .iter()
        .map(|&(s, c)| (s - c * mean).powi(2))
        .sum();
    (ss / (b as f64 * (b as f64 - 1.0) * cbar * cbar)).sqrt()
}

/// Sample means of `prod_i w(p_i)` using the trace form of the density.
/// A draw is rejected when `K(p)` is numerically singular at any requested
/// angle, so every point averages over the same draws.
pub fn estimate_ck(cfg: &RunConfig, points: &[Vec<f64>]) -> Result<CorrelationGrid> {
    cfg.validate()?;
    let k = points.first().map_or(0, Vec::len);
    if k == 0 || points.iter().any(|p| p.len() != k) {
        return Err(Error::InvalidArgument(
            "points must be nonempty tuples of equal length".into(),
        ));
    }
    if points.iter().flatten().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("angles must be finite".into()));
    }

    // distinct angles, and each tuple as indices into them
    let mut angles: Vec<f64> = Vec::new();
    let index: Vec<Vec<usize>> = points
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .map(|&p| match angles.iter().position(|&a| a == p) {
                    Some(j) => j,
                    None => {
                        angles.push(p);
                        angles.len() - 1
                    }
                })
                .collect()
        })
        .collect();

    let parts = map_batches(cfg, |range| {
        let mut b = CorrelationBatch {
            sums: vec![C64::new(0.0, 0.0); points.len()],
            used: 0,
            rejections: Rejections::default(),
        };
        let mut w = vec![C64::new(0.0, 0.0); angles.len()];
        'sample: for i in range {
            let field = draw_field(cfg, i);
            for (slot, &p) in w.iter_mut().zip(&angles) {
                match winding_density(&field, p) {
                    Ok(v) => *slot = v,
                    Err(e) => {
                        b.rejections.record(&e);
                        continue 'sample;
                    }
                }
            }
            for (sum, idx) in b.sums.iter_mut().zip(&index) {
                *sum += idx.iter().map(|&j| w[j]).product::<C64>();
            }
            b.used += 1;
        }
        b
    })?;

    let counts: Vec<u64> = parts.iter().map(|p| p.used).collect();
    let used: u64 = counts.iter().sum();
    let mut rejections = Rejections::default();
    for p in &parts {
        rejections.merge(&p.rejections);
    }
    if used == 0 {
        return Err(Error::InvalidArgument(format!(
            "all {} draws were rejected",
            cfg.samples
        )));
    }

    let mut mean = Vec::with_capacity(points.len());
    let mut stderr = Vec::with_capacity(points.len());
    let mut stderr_im = Vec::with_capacity(points.len());
    for j in 0..points.len() {
        let re: Vec<f64> = parts.iter().map(|p| p.sums[j].re).collect();
        let im: Vec<f64> = parts.iter().map(|p| p.sums[j].im).collect();
        let total = C64::new(re.iter().sum(), im.iter().sum());
        mean.push(total / used as f64);
        stderr.push(batch_means_stderr(&re, &counts));
        stderr_im.push(batch_means_stderr(&im, &counts));
    }
    Ok(CorrelationGrid {
        k,
        points: points.to_vec(),
        mean,
        stderr,
        stderr_im,
        samples_used: used,
        samples_rejected: rejections.total(),
        rejections,
        warning: rejection_warning(rejections.total(), cfg.samples),
    })
}

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimate {
    pub mean: Estimate,
    /// Sample variance of `W` (plug-in, `1/n` normalization).
    pub variance: Estimate,
    pub accepted: u64,
    pub rejections: Rejections,
    pub warning: Option<String>,
}

/// Mean and variance of `W` by eigenvalue counting, with block jackknife
/// errors over the fixed sample batches.
pub fn estimate_moments(cfg: &RunConfig) -> Result<MomentEstimate> {
    cfg.validate()?;
    // per batch: (count, sum W, sum W^2, rejections)
    let parts = map_batches(cfg, |range| {
        let mut acc = (0u64, 0.0f64, 0.0f64, Rejections::default());
        for i in range {
            match count_sample(cfg, &draw_field(cfg, i)) {
                Ok(s) => {
                    let w = s.w as f64;
                    acc.0 += 1;
                    acc.1 += w;
                    acc.2 += w * w;
                }
                Err(r) => acc.3.merge(&r),
            }
        }
        acc
    })?;

    let mut rejections = Rejections::default();
    for p in &parts {
        rejections.merge(&p.3);
    }
    let count: u64 = parts.iter().map(|p| p.0).sum();
    let s1: f64 = parts.iter().map(|p| p.1).sum();
    let s2: f64 = parts.iter().map(|p| p.2).sum();
    if count < 2 {
        return Err(Error::InvalidArgument(
            "moment estimates need at least two accepted draws".into(),
        ));
    }

    let stats = |c: f64, a: f64, b: f64| {
        let mean = a / c;
        let var = b / c - mean * mean;
        (mean, var)
    };
    let (mean, variance) = stats(count as f64, s1, s2);

    let leave_out: Vec<(f64, f64)> = parts
        .iter()
        .filter(|p| p.0 > 0)
        .map(|p| stats((count - p.0) as f64, s1 - p.1, s2 - p.2))
        .collect();
    let jackknife = |f: fn(&(f64, f64)) -> f64| {
        let b = leave_out.len() as f64;
        if b < 2.0 || leave_out.iter().any(|x| !f(x).is_finite()) {
            return f64::INFINITY;
        }
        let avg = leave_out.iter().map(f).sum::<f64>() / b;
        ((b - 1.0) / b * leave_out.iter().map(|x| (f(x) - avg).powi(2)).sum::<f64>()).sqrt()
    };

    Ok(MomentEstimate {
        mean: Estimate {
            value: mean,
            stderr: jackknife(|x| x.0),
        },
        variance: Estimate {
            value: variance,
            stderr: jackknife(|x| x.1),
        },
        accepted: count,
        rejections,
        warning: rejection_warning(rejections.total(), cfg.samples),
    })
}
