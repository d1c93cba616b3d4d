use std::f64::consts::FRAC_PI_2;

use chiral_winding::analytic::{c2, ck_assemble, winding_distribution};
use chiral_winding::montecarlo::{estimate_ck, estimate_distribution, estimate_moments, RunConfig};

#[test]
fn single_mode_is_a_fair_coin() {
    let est = estimate_distribution(&RunConfig::new(1, 100_000, 21).with_workers(4)).unwrap();
    let exact = winding_distribution(1).unwrap();
    let p = est.distribution.mass(1);
    let sigma = est.stderr_at(1);
    assert!((sigma - 0.0016).abs() < 1e-4);
    assert!((p - exact.mass(1)).abs() < 4.0 * sigma, "P(+1) = {p}, sigma = {sigma}");
    assert_eq!(est.rejections.total(), 0);
    assert!(est.warning.is_none());
}

#[test]
fn counts_do_not_depend_on_workers() {
    let cfg = RunConfig::new(6, 5000, 2);
    let one = estimate_distribution(&cfg).unwrap();
    let eight = estimate_distribution(&cfg.clone().with_workers(8)).unwrap();
    assert_eq!(one.counts, eight.counts);
    assert_eq!(one.rejections, eight.rejections);
}

#[test]
fn retained_samples_respect_parity_and_bounds() {
    for n in 1..=6 {
        let est = estimate_distribution(&RunConfig::new(n, 2000, 8)).unwrap();
        for (i, &c) in est.counts.iter().enumerate() {
            if i % 2 == 1 {
                assert_eq!(c, 0, "n={n} odd offset {i}");
            }
        }
        assert_eq!(est.counts.len(), 2 * n + 1);
    }
}

#[test]
fn one_point_function_vanishes() {
    let g = estimate_ck(&RunConfig::new(3, 100_000, 12).with_workers(4), &[vec![0.7]]).unwrap();
    assert!(g.mean[0].re.abs() < 4.0 * g.stderr[0], "{:?} se {}", g.mean[0], g.stderr[0]);
    assert!(g.mean[0].im.abs() < 4.0 * g.stderr_im[0]);
}

#[test]
fn two_point_at_quarter_turn_is_minus_one() {
    let g = estimate_ck(&RunConfig::new(4, 10_000, 13).with_workers(4), &[vec![0.0, FRAC_PI_2]]).unwrap();
    assert!((g.mean[0].re + 1.0).abs() < 3.0 * g.stderr[0], "{:?} se {}", g.mean[0], g.stderr[0]);
}

#[test]
fn two_point_closed_form_and_real_average() {
    let cfg = RunConfig::new(8, 10_000, 14).with_workers(4);
    let g = estimate_ck(&cfg, &[vec![0.0, 0.5]]).unwrap();
    let exact = c2(0.0, 0.5, 8).unwrap();
    assert!((g.mean[0].re - exact).abs() < 3.0 * g.stderr[0], "{:?} vs {exact}", g.mean[0]);
    assert!(g.mean[0].im.abs() < 4.0 * g.stderr_im[0]);
    assert_eq!(g.points.len(), g.mean.len());
    assert!(g.stderr.iter().all(|&s| s >= 0.0));
}

#[test]
fn three_point_matches_assembly() {
    let p = vec![0.4, 1.3, 2.1];
    let exact = ck_assemble(&p, 4).unwrap();
    let g = estimate_ck(&RunConfig::new(4, 100_000, 15).with_workers(4), &[p]).unwrap();
    assert!(
        (g.mean[0].re - exact).abs() < 3.0 * g.stderr[0],
        "estimate {:?} se {} vs {exact}",
        g.mean[0],
        g.stderr[0]
    );
}

#[test]
fn coincident_two_point_diagnostic() {
    // <w(p)^2> at one point: the closed form refuses it (its limit is -N).
    // The estimate is reported, not gated; w has a heavy tail here.
    let n = 2;
    let g = estimate_ck(&RunConfig::new(n, 20_000, 16), &[vec![0.9, 0.9]]).unwrap();
    assert!(g.mean[0].re.is_finite());
    println!(
        "N = {n}: <w(p)^2> estimate {:.3} +- {:.3} (closed-form limit {})",
        g.mean[0].re,
        g.stderr[0],
        -(n as f64)
    );
}

#[test]
fn moment_estimates() {
    let m1 = estimate_moments(&RunConfig::new(1, 100_000, 17).with_workers(4)).unwrap();
    assert!((m1.variance.value - 1.0).abs() < 4.0 * m1.variance.stderr.max(1e-12));
    let m2 = estimate_moments(&RunConfig::new(2, 100_000, 18).with_workers(4)).unwrap();
    assert!((m2.variance.value - 1.5).abs() < 4.0 * m2.variance.stderr);
    let m25 = estimate_moments(&RunConfig::new(25, 100_000, 19).with_workers(4)).unwrap();
    assert!(m25.mean.value.abs() < 4.0 * m25.mean.stderr, "{:?}", m25.mean);
}
