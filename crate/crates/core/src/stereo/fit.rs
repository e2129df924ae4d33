//! Second-order least-squares fit of error against distance.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use super::StereoError;

/// `c0 + c1·x + c2·x²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl QuadraticFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.c0 + x * (self.c1 + x * self.c2)
    }

    /// Root mean square of `y − eval(x)` over `points`.
    pub fn residual_rms(&self, points: &[(f64, f64)]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let ss: f64 = points
            .iter()
            .map(|&(x, y)| (y - self.eval(x)) * (y - self.eval(x)))
            .sum();
        (ss / points.len() as f64).sqrt()
    }
}

/// Least-squares quadratic through `(distance, rms)` pairs, solved by SVD of
/// the Vandermonde matrix.
pub fn fit_error_curve(points: &[(f64, f64)]) -> Result<QuadraticFit, StereoError> {
    if points.iter().any(|&(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(StereoError::BadParams("fit input must be finite"));
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(StereoError::Underdetermined(xs.len()));
    }
    let n = points.len();
    let a = DMatrix::from_fn(n, 3, |i, j| points[i].0.powi(j as i32));
    let b = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|_| StereoError::Underdetermined(xs.len()))?;
    Ok(QuadraticFit {
        c0: c[0],
        c1: c[1],
        c2: c[2],
    })
}
