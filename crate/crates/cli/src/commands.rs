//! The five subcommands. Each resolves its settings against defaults,
//! computes a table, and returns it together with a summary for the sidecar.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use chiral_winding::analytic::{
    c1, c2, ck_translated, gaussian_approx, moment_quadrature, rescaled_c2, unfolded_f2,
    variance_analytic, winding_distribution, MAX_ASSEMBLY_ORDER, MAX_PERMUTATION_DIM,
    MAX_QUADRATURE_N,
};
use chiral_winding::ensemble::{sample_stream, ParametricField};
use chiral_winding::montecarlo::{estimate_ck, estimate_distribution, RunConfig};
use chiral_winding::spectral::{
    circle_spectrum_with, density_trace, uniform_angles, winding_contour, winding_from_count,
    ContourGrid, DEFAULT_CONDITION_THRESHOLD, DEFAULT_EPSILON_CIRCLE,
};
use chiral_winding::{ComplexMat, Error, C64};

use crate::config::Settings;
use crate::output::{emit, num, opt, ExperimentRecord, Table, BUILD_ID};
use crate::CliError;

pub const DISTRIBUTION_HEADER: [&str; 5] =
    ["W", "p_analytic", "p_empirical", "stderr", "gaussian_approx"];
pub const CORR_HEADER: [&str; 5] = ["p-tuple", "analytic", "mc_mean_re", "mc_mean_im", "stderr"];
pub const UNFOLD_HEADER: [&str; 5] = ["alpha", "N", "psi_delta", "rescaled_c2", "f2_limit"];
pub const MOMENTS_HEADER: [&str; 4] =
    ["N", "variance_analytic", "variance_quadrature", "asymptotic_2sqrtNpi"];
pub const TRACE_HEADER: [&str; 3] = ["p", "re_w", "im_w"];

const DEFAULT_N: usize = 4;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_DISTRIBUTION_SAMPLES: u64 = 100_000;
const DEFAULT_CORR_SAMPLES: u64 = 10_000;
const DEFAULT_K: usize = 2;
const DEFAULT_SEPARATIONS: [f64; 4] = [0.25, 0.5, 1.0, 1.5];
const DEFAULT_ALPHA: f64 = 0.5;
const SQRT_N_SIZES: [usize; 8] = [2, 5, 7, 10, 15, 20, 50, 100];
const OTHER_ALPHA_SIZES: [usize; 9] = [5, 10, 20, 50, 100, 150, 200, 300, 1000];
const DEFAULT_PSI: (f64, f64, f64) = (0.1, 5.0, 0.1);
const DEFAULT_N_MAX: usize = 50;
const DEFAULT_GRID_SIZE: usize = 256;
const MIN_GRID_SIZE: usize = 16;
const CONTOUR_REFINEMENT_LIMIT: usize = 40;
const MAX_RESAMPLES: u64 = 64;

struct Outcome {
    csv: Vec<u8>,
    summary: serde_json::Value,
    notes: Vec<String>,
}

pub fn dispatch(command: &str, settings: Settings, out: Option<&Path>) -> Result<(), CliError> {
    let start = Instant::now();
    let mut resolved = Settings::default();
    let outcome = match command {
        "distribution" => distribution(&settings, &mut resolved)?,
        "corr" => corr(&settings, &mut resolved)?,
        "unfold" => unfold(&settings, &mut resolved)?,
        "moments" => moments(&settings, &mut resolved)?,
        "density-trace" => trace(&settings, &mut resolved)?,
        other => return Err(CliError::Usage(format!("unknown command {other}"))),
    };
    for note in &outcome.notes {
        eprintln!("warning: {note}");
    }
    let record = ExperimentRecord {
        command: command.to_string(),
        config: resolved,
        git_or_build_id: BUILD_ID.to_string(),
        outputs: Vec::new(),
        wall_time: start.elapsed().as_secs_f64(),
        summary: outcome.summary,
        notes: outcome.notes,
    };
    emit(out, &outcome.csv, record)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Fills the sampling fields of `resolved` and builds the matching config.
fn run_config(s: &Settings, resolved: &mut Settings, default_samples: u64) -> Result<RunConfig, CliError> {
    let cfg = RunConfig {
        n: s.n.unwrap_or(DEFAULT_N),
        samples: s.samples.unwrap_or(default_samples),
        seed: s.seed.unwrap_or(DEFAULT_SEED),
        workers: s.workers.unwrap_or_else(default_workers),
        epsilon_circle: s.epsilon_circle.unwrap_or(DEFAULT_EPSILON_CIRCLE),
        condition_threshold: s.condition_threshold.unwrap_or(DEFAULT_CONDITION_THRESHOLD),
    };
    resolved.n = Some(cfg.n);
    resolved.samples = Some(cfg.samples);
    resolved.seed = Some(cfg.seed);
    resolved.workers = Some(cfg.workers);
    resolved.epsilon_circle = Some(cfg.epsilon_circle);
    resolved.condition_threshold = Some(cfg.condition_threshold);
    cfg.validate()?;
    Ok(cfg)
}

fn require_n(s: &Settings, resolved: &mut Settings) -> Result<usize, CliError> {
    let n = s.n.unwrap_or(DEFAULT_N);
    resolved.n = Some(n);
    if n == 0 {
        return Err(CliError::Usage("N must be at least 1".into()));
    }
    Ok(n)
}

fn distribution(s: &Settings, resolved: &mut Settings) -> Result<Outcome, CliError> {
    let analytic_only = s.analytic_only.unwrap_or(false);
    resolved.analytic_only = Some(analytic_only);
    let (n, estimate) = if analytic_only {
        (require_n(s, resolved)?, None)
    } else {
        let cfg = run_config(s, resolved, DEFAULT_DISTRIBUTION_SAMPLES)?;
        (cfg.n, Some(estimate_distribution(&cfg)?))
    };
    let exact = winding_distribution(n)?;

    // Gaussian weights normalized over the parity support.
    let weights: Vec<f64> = exact
        .support()
        .map(|(w, _)| gaussian_approx(n, w))
        .collect::<Result<_, _>>()?;
    let norm: f64 = weights.iter().sum();

    let mut table = Table::new(&DISTRIBUTION_HEADER)?;
    for ((w, p), g) in exact.support().zip(&weights) {
        let (emp, se) = match &estimate {
            Some(e) => (Some(e.distribution.mass(w)), Some(e.stderr_at(w))),
            None => (None, None),
        };
        table.row([w.to_string(), num(p), opt(emp), opt(se), num(g / norm)])?;
    }

    let mut notes = Vec::new();
    let summary = json!({
        "N": n,
        "samples": estimate.as_ref().map(|e| e.accepted + e.rejections.total()),
        "seed": resolved.seed,
        "variance_analytic": variance_analytic(n)?,
        "variance_empirical": estimate.as_ref().map(|e| e.distribution.second_moment()),
        "rejection_count": estimate.as_ref().map(|e| e.rejections.total()),
        "rejections": estimate.as_ref().map(|e| e.rejections),
    });
    if let Some(w) = estimate.and_then(|e| e.warning) {
        notes.push(w);
    }
    Ok(Outcome {
        csv: table.into_bytes()?,
        summary,
        notes,
    })
}

fn corr(s: &Settings, resolved: &mut Settings) -> Result<Outcome, CliError> {
    let k = s.k.unwrap_or(DEFAULT_K);
    resolved.k = Some(k);
    if k > MAX_ASSEMBLY_ORDER {
        return Err(CliError::Usage(format!(
            "k = {k} exceeds the combinatorial cap: connected correlators are assembled \
             only for k <= {MAX_ASSEMBLY_ORDER}"
        )));
    }
    if k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }

    let tuples: Vec<Vec<f64>> = match &s.points {
        Some(points) => {
            resolved.points = Some(points.clone());
            points.clone()
        }
        None => {
            let seps = s.sep.clone().unwrap_or_else(|| DEFAULT_SEPARATIONS.to_vec());
            resolved.sep = Some(seps.clone());
            seps.iter()
                .map(|&d| match k {
                    1 => vec![d],
                    _ => (0..k).map(|i| i as f64 * d).collect(),
                })
                .collect()
        }
    };
    if tuples.is_empty() {
        return Err(CliError::Usage("no points requested".into()));
    }
    if let Some(t) = tuples.iter().find(|t| t.len() != k || t.iter().any(|x| !x.is_finite())) {
        return Err(CliError::Usage(format!("tuple {t:?} must hold {k} finite angles")));
    }

    let analytic_only = s.analytic_only.unwrap_or(false);
    resolved.analytic_only = Some(analytic_only);
    let n;
    let grid = if analytic_only {
        n = require_n(s, resolved)?;
        None
    } else {
        let cfg = run_config(s, resolved, DEFAULT_CORR_SAMPLES)?;
        n = cfg.n;
        Some(estimate_ck(&cfg, &tuples)?)
    };

    let mut notes = Vec::new();
    let mut table = Table::new(&CORR_HEADER)?;
    for (i, t) in tuples.iter().enumerate() {
        let analytic = match k {
            1 => Some(c1(t[0])),
            2 => match c2(t[0], t[1], n) {
                Ok(v) => Some(v),
                Err(Error::CoincidentPoints { limit }) => {
                    notes.push(format!("{t:?}: coincident points, continuous limit {limit}"));
                    None
                }
                Err(e) => return Err(e.into()),
            },
            _ if n > MAX_PERMUTATION_DIM => None,
            _ => match ck_translated(t, n) {
                Ok(v) => Some(v),
                Err(e) => {
                    notes.push(format!("{t:?}: no closed form ({e})"));
                    None
                }
            },
        };
        let label = t.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";");
        let (re, im, se) = match &grid {
            Some(g) => (num(g.mean[i].re), num(g.mean[i].im), num(g.stderr[i])),
            None => Default::default(),
        };
        table.row([label, opt(analytic), re, im, se])?;
    }
    if k == 3 && n > MAX_PERMUTATION_DIM {
        notes.push(format!(
            "three-point closed form evaluated only for N <= {MAX_PERMUTATION_DIM}"
        ));
    }

    let summary = match &grid {
        Some(g) => json!({
            "N": n,
            "k": k,
            "stderr_im": g.stderr_im,
            "samples_used": g.samples_used,
            "samples_rejected": g.samples_rejected,
            "rejections": g.rejections,
        }),
        None => json!({ "N": n, "k": k }),
    };
    if let Some(w) = grid.and_then(|g| g.warning) {
        notes.push(w);
    }
    Ok(Outcome {
        csv: table.into_bytes()?,
        summary,
        notes,
    })
}

/// `min, min + step, ...` up to `max`, rounded to 12 decimals so that
/// printed values stay short.
fn psi_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && min.is_finite() && max.is_finite() && max >= min) {
        return Err(CliError::Usage(format!(
            "bad psi grid: min {min}, max {max}, step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|j| ((min + j as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn unfold(s: &Settings, resolved: &mut Settings) -> Result<Outcome, CliError> {
    let alpha = s.alpha.unwrap_or(DEFAULT_ALPHA);
    resolved.alpha = Some(alpha);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CliError::Usage(format!("alpha must be positive, got {alpha}")));
    }
    let sizes = s.n_list.clone().unwrap_or_else(|| {
        if (alpha - 0.5).abs() < 1e-12 {
            SQRT_N_SIZES.to_vec()
        } else {
            OTHER_ALPHA_SIZES.to_vec()
        }
    });
    resolved.n_list = Some(sizes.clone());
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("n-list must hold sizes of at least 1".into()));
    }
    let (min, max, step) = (
        s.psi_min.unwrap_or(DEFAULT_PSI.0),
        s.psi_max.unwrap_or(DEFAULT_PSI.1),
        s.psi_step.unwrap_or(DEFAULT_PSI.2),
    );
    resolved.psi_min = Some(min);
    resolved.psi_max = Some(max);
    resolved.psi_step = Some(step);
    let psi = psi_grid(min, max, step)?;

    let limits: Vec<Option<f64>> = psi.iter().map(|&d| unfolded_f2(alpha, d, 0.0).ok()).collect();
    let mut table = Table::new(&UNFOLD_HEADER)?;
    for &n in &sizes {
        for (&d, &f2) in psi.iter().zip(&limits) {
            let r = rescaled_c2(alpha, n, d, 0.0).ok();
            table.row([num(alpha), n.to_string(), num(d), opt(r), opt(f2)])?;
        }
    }
    Ok(Outcome {
        csv: table.into_bytes()?,
        summary: json!({ "rows": sizes.len() * psi.len() }),
        notes: Vec::new(),
    })
}

fn moments(s: &Settings, resolved: &mut Settings) -> Result<Outcome, CliError> {
    let sizes = match &s.n_list {
        Some(list) => {
            resolved.n_list = Some(list.clone());
            list.clone()
        }
        None => {
            let n_max = s.n_max.unwrap_or(DEFAULT_N_MAX);
            resolved.n_max = Some(n_max);
            (1..=n_max).collect()
        }
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("n-max must be at least 1".into()));
    }
    let mut table = Table::new(&MOMENTS_HEADER)?;
    for &n in &sizes {
        let quad = if n <= MAX_QUADRATURE_N {
            Some(moment_quadrature(n)?)
        } else {
            None
        };
        let asymptotic = 2.0 * (n as f64 / PI).sqrt();
        table.row([n.to_string(), num(variance_analytic(n)?), opt(quad), num(asymptotic)])?;
    }
    Ok(Outcome {
        csv: table.into_bytes()?,
        summary: json!({ "rows": sizes.len() }),
        notes: Vec::new(),
    })
}

fn fixed_field() -> ParametricField {
    let i = C64::new(0.0, 1.0);
    ParametricField::new(ComplexMat::identity(2), ComplexMat::from_diag(&[i, i]))
        .expect("2x2 blocks")
}

struct TraceResult {
    values: Vec<C64>,
    w_count: i64,
    w_contour: i64,
    near_unit_circle: bool,
}

fn trace_field(
    field: &ParametricField,
    angles: &[f64],
    grid: &ContourGrid,
    epsilon: f64,
    threshold: f64,
) -> Result<TraceResult, Error> {
    let values = density_trace(field, angles)?;
    let spec = circle_spectrum_with(field, threshold)?;
    let count = winding_from_count(&spec, epsilon);
    let w_contour = winding_contour(field, grid)?;
    Ok(TraceResult {
        values,
        w_count: count.w,
        w_contour,
        near_unit_circle: count.flags.near_unit_circle,
    })
}

fn trace(s: &Settings, resolved: &mut Settings) -> Result<Outcome, CliError> {
    let fixed = s.debug_fixed_field.unwrap_or(false);
    let m = s.grid_size.unwrap_or(DEFAULT_GRID_SIZE);
    let seed = s.seed.unwrap_or(DEFAULT_SEED);
    let epsilon = s.epsilon_circle.unwrap_or(DEFAULT_EPSILON_CIRCLE);
    let threshold = s.condition_threshold.unwrap_or(DEFAULT_CONDITION_THRESHOLD);
    resolved.debug_fixed_field = Some(fixed);
    resolved.grid_size = Some(m);
    resolved.epsilon_circle = Some(epsilon);
    resolved.condition_threshold = Some(threshold);
    let n = if fixed {
        resolved.n = Some(2);
        2
    } else {
        resolved.seed = Some(seed);
        require_n(s, resolved)?
    };
    if m < MIN_GRID_SIZE {
        return Err(CliError::Usage(format!(
            "grid-size must be at least {MIN_GRID_SIZE}, got {m}"
        )));
    }
    let angles = uniform_angles(m);
    let grid = ContourGrid::uniform(m, CONTOUR_REFINEMENT_LIMIT)?;

    let mut notes = Vec::new();
    let (stream, result) = if fixed {
        (None, trace_field(&fixed_field(), &angles, &grid, epsilon, threshold)?)
    } else {
        let mut found = None;
        for index in 0..MAX_RESAMPLES {
            let field = ParametricField::sample(n, &mut sample_stream(seed, index));
            match trace_field(&field, &angles, &grid, epsilon, threshold) {
                Ok(r) => {
                    found = Some((Some(index), r));
                    break;
                }
                Err(e) => notes.push(format!("substream {index} rejected: {e}; resampled")),
            }
        }
        found.ok_or_else(|| {
            CliError::Numerical(format!("no usable sample in {MAX_RESAMPLES} substreams"))
        })?
    };
    if result.near_unit_circle {
        notes.push("an eigenvalue lies within epsilon_circle of the unit circle".into());
    }
    if result.w_count != result.w_contour {
        notes.push(format!(
            "evaluators disagree: count {} vs contour {}",
            result.w_count, result.w_contour
        ));
    }

    let mut table = Table::new(&TRACE_HEADER)?;
    let mut sum = C64::new(0.0, 0.0);
    for (&p, w) in angles.iter().zip(&result.values) {
        table.row([num(p), num(w.re), num(w.im)])?;
        sum += w;
    }
    let trapezoid = sum * (TAU / m as f64) / C64::new(0.0, TAU);

    Ok(Outcome {
        csv: table.into_bytes()?,
        summary: json!({
            "N": n,
            "stream_index": stream,
            "w_count": result.w_count,
            "w_contour": result.w_contour,
            "trapezoid_re": trapezoid.re,
            "trapezoid_im": trapezoid.im,
        }),
        notes,
    })
}
