//! Winding number by tracking the phase of `det K(p)` around `p in [0, 2 pi)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::ensemble::ParametricField;
use crate::error::{Error, Result};
use crate::matrix::C64;

use super::{density_from_lu, factor_field, winding_density};

/// Starting angles for phase tracking plus the maximum bisection depth of any
/// single step.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourGrid {
    points: Vec<f64>,
    refinement_limit: usize,
}

impl ContourGrid {
    pub fn new(points: Vec<f64>, refinement_limit: usize) -> Result<Self> {
        if points.len() < 8 {
            return Err(Error::InvalidArgument(format!(
                "contour grid needs at least 8 points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidArgument("contour grid must start at 0".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) || *points.last().unwrap() >= TAU {
            return Err(Error::InvalidArgument(
                "contour grid must be strictly increasing within [0, 2 pi)".into(),
            ));
        }
        if refinement_limit == 0 {
            return Err(Error::InvalidArgument("refinement limit must be positive".into()));
        }
        Ok(Self {
            points,
            refinement_limit,
        })
    }

    pub fn uniform(m: usize, refinement_limit: usize) -> Result<Self> {
        Self::new(super::uniform_angles(m), refinement_limit)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn refinement_limit(&self) -> usize {
        self.refinement_limit
    }
}

impl Default for ContourGrid {
    fn default() -> Self {
        Self::uniform(32, 40).expect("valid default grid")
    }
}

/// `det K(p)` and the phase velocity `d/dp arg det K(p) = Im w(p)`.
#[derive(Clone, Copy)]
struct PhasePoint {
    p: f64,
    det: C64,
    velocity: f64,
}

fn phase_point(field: &ParametricField, p: f64) -> Result<PhasePoint> {
    let lu = factor_field(field, p)?;
    let det = lu.det();
    if det.norm() == 0.0 || !det.norm().is_finite() {
        return Err(Error::SingularField { p });
    }
    let velocity = density_from_lu(field, &lu, p)?.im;
    Ok(PhasePoint { p, det, velocity })
}

/// Phase change of `det K` from `a` to `b`. A step is accepted when its
/// wrapped increment is at most `pi / 2` and agrees with the trapezoid
/// prediction from the phase velocity at both ends; otherwise it is bisected.
/// The velocity test catches steps that alias past a full half-turn.
fn phase_increment(
    field: &ParametricField,
    a: PhasePoint,
    b: PhasePoint,
    depth: usize,
    limit: usize,
) -> Result<f64> {
    let step = (b.det * a.det.conj()).arg();
    let predicted = 0.5 * (b.p - a.p) * (a.velocity + b.velocity);
    if step.abs() <= FRAC_PI_2 && (step - predicted).abs() <= FRAC_PI_4 {
        return Ok(step);
    }
    if depth >= limit {
        return Err(Error::ContourRefinement { limit, p: a.p });
    }
    let mid = phase_point(field, 0.5 * (a.p + b.p))?;
    Ok(phase_increment(field, a, mid, depth + 1, limit)?
        + phase_increment(field, mid, b, depth + 1, limit)?)
}

/// `W = (1 / 2 pi) * total phase change of det K(p)` over one period.
pub fn winding_contour(field: &ParametricField, grid: &ContourGrid) -> Result<i64> {
    let mut angles = grid.points.clone();
    angles.push(TAU);
    let nodes: Vec<PhasePoint> = angles
        .iter()
        .map(|&p| phase_point(field, p))
        .collect::<Result<_>>()?;

    let mut total = 0.0;
    for pair in nodes.windows(2) {
        total += phase_increment(field, pair[0], pair[1], 0, grid.refinement_limit)?;
    }
    let w = (total / TAU).round();
    if (total - w * TAU).abs() > 1e-6 {
        return Err(Error::ContourRefinement {
            limit: grid.refinement_limit,
            p: 0.0,
        });
    }
    Ok(w as i64)
}

/// `(1 / 2 pi i) * trapezoid sum of w(p)` on `m` uniform points.
pub fn winding_trapezoid(field: &ParametricField, m: usize) -> Result<C64> {
    let h = TAU / m as f64;
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..m {
        sum += winding_density(field, j as f64 * h)?;
    }
    Ok(sum * h / C64::new(0.0, 2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::sample_stream;
    use crate::matrix::ComplexMat;
    use crate::spectral::{circle_spectrum, winding_from_count, DEFAULT_EPSILON_CIRCLE};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag_field(k1: &[C64], k2: &[C64]) -> ParametricField {
        ParametricField::new(ComplexMat::from_diag(k1), ComplexMat::from_diag(k2)).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(ContourGrid::uniform(7, 10).is_err());
        assert!(ContourGrid::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8], 10).is_err());
        assert!(ContourGrid::new(vec![0.0, 0.2, 0.1, 0.4, 0.5, 0.6, 0.7, 0.8], 10).is_err());
        assert!(ContourGrid::uniform(8, 0).is_err());
        assert!(ContourGrid::uniform(8, 10).is_ok());
    }

    #[test]
    fn phase_fields() {
        let g = ContourGrid::default();
        let f = diag_field(&[c(1.0, 0.0); 2], &[c(0.0, 1.0); 2]);
        assert_eq!(winding_contour(&f, &g).unwrap(), 2);
        let f = diag_field(&[c(1.0, 0.0); 2], &[c(0.0, -1.0); 2]);
        assert_eq!(winding_contour(&f, &g).unwrap(), -2);
    }

    #[test]
    fn ellipse_winds_once() {
        let f = diag_field(&[c(1.0, 0.0)], &[c(0.0, 0.5)]);
        assert_eq!(winding_contour(&f, &ContourGrid::default()).unwrap(), 1);
    }

    #[test]
    fn coarse_grid_is_refined() {
        // det = e^{12 i p} turns by 3 pi / 2 per step of a 16-point grid.
        let f = diag_field(&[c(1.0, 0.0); 12], &[c(0.0, 1.0); 12]);
        let g = ContourGrid::uniform(16, 10).unwrap();
        assert_eq!(winding_contour(&f, &g).unwrap(), 12);
        let tight = ContourGrid::uniform(8, 1).unwrap();
        assert!(matches!(winding_contour(&f, &tight), Err(Error::ContourRefinement { .. })));
    }

    #[test]
    fn singular_on_grid() {
        let f = diag_field(&[c(1.0, 0.0)], &[c(0.0, 0.0)]);
        let g = ContourGrid::uniform(8, 10).unwrap();
        assert!(matches!(winding_contour(&f, &g), Err(Error::SingularField { .. })));
    }

    #[test]
    fn agrees_with_count_and_trapezoid() {
        let g = ContourGrid::default();
        for seed in 0..50 {
            let n = 2 + (seed as usize % 5);
            let f = ParametricField::sample(n, &mut sample_stream(31, seed));
            let count = winding_from_count(&circle_spectrum(&f).unwrap(), DEFAULT_EPSILON_CIRCLE);
            let w = winding_contour(&f, &g).unwrap();
            assert_eq!(w, count.w);
            let trap = winding_trapezoid(&f, 4096).unwrap();
            assert!((trap - c(w as f64, 0.0)).norm() < 1e-3, "seed={seed} trap={trap}");
        }
    }
}
