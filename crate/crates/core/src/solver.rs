//! Scalar root finding: Newton's method with a bisection fallback.
//!
//! Used to invert the radial laws of the polynomial camera models. Newton is
//! run from a caller-provided seed; if an iterate leaves the bracket, the
//! derivative vanishes, or the iteration budget runs out, the solver falls
//! back to bisection on the bracket (which must then change sign).

#[allow(unused_imports)]
use num_traits::Float;

/// Stopping rules for [`SafeguardedNewton::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeguardedNewton {
    /// Newton iteration budget before falling back to bisection.
    pub max_newton_iterations: u32,
    /// Bisection iteration budget.
    pub max_bisection_iterations: u32,
    /// Converged when `|f(x)| <= residual_tolerance`.
    pub residual_tolerance: f64,
    /// Converged when the last Newton step satisfies `|dx| < step_tolerance`.
    pub step_tolerance: f64,
}

/// Result of a successful root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolution {
    pub root: f64,
    /// `f(root)`.
    pub residual: f64,
    /// Newton steps taken (including the ones before a fallback).
    pub newton_iterations: u32,
    pub used_bisection: bool,
}

impl SafeguardedNewton {
    /// Finds a root of `f` on `[lo, hi]`, seeded at `x0`.
    ///
    /// `f` returns `(value, derivative)`. Returns `None` when Newton fails and
    /// the bracket does not change sign, or bisection runs out of budget.
    pub fn solve<F>(&self, f: F, x0: f64, lo: f64, hi: f64) -> Option<RootSolution>
    where
        F: Fn(f64) -> (f64, f64),
    {
        let mut x = x0.max(lo).min(hi);
        let mut iterations = 0;
        while iterations < self.max_newton_iterations {
            let (value, slope) = f(x);
            if !value.is_finite() {
                break;
            }
            if value.abs() <= self.residual_tolerance {
                return Some(RootSolution {
                    root: x,
                    residual: value,
                    newton_iterations: iterations,
                    used_bisection: false,
                });
            }
            if slope == 0.0 || !slope.is_finite() {
                break;
            }
            let step = value / slope;
            let next = x - step;
            iterations += 1;
            if !(lo..=hi).contains(&next) {
                break;
            }
            x = next;
            if step.abs() < self.step_tolerance {
                let (value, _) = f(x);
                return Some(RootSolution {
                    root: x,
                    residual: value,
                    newton_iterations: iterations,
                    used_bisection: false,
                });
            }
        }
        self.bisect(&f, lo, hi).map(|(root, residual)| RootSolution {
            root,
            residual,
            newton_iterations: iterations,
            used_bisection: true,
        })
    }

    fn bisect<F>(&self, f: &F, mut lo: f64, mut hi: f64) -> Option<(f64, f64)>
    where
        F: Fn(f64) -> (f64, f64),
    {
        let (mut f_lo, _) = f(lo);
        let (f_hi, _) = f(hi);
        if f_lo == 0.0 {
            return Some((lo, 0.0));
        }
        if f_hi == 0.0 {
            return Some((hi, 0.0));
        }
        if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
            return None;
        }
        for _ in 0..self.max_bisection_iterations {
            let mid = 0.5 * (lo + hi);
            let (f_mid, _) = f(mid);
            if f_mid.abs() <= self.residual_tolerance || mid == lo || mid == hi {
                return Some((mid, f_mid));
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
            if (hi - lo) < self.step_tolerance {
                let mid = 0.5 * (lo + hi);
                return Some((mid, f(mid).0));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVER: SafeguardedNewton = SafeguardedNewton {
        max_newton_iterations: 50,
        max_bisection_iterations: 200,
        residual_tolerance: 1e-13,
        step_tolerance: 1e-14,
    };

    #[test]
    fn newton_finds_sqrt_two() {
        let sol = SOLVER.solve(|x| (x * x - 2.0, 2.0 * x), 1.0, 0.0, 2.0).unwrap();
        assert!((sol.root - core::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(!sol.used_bisection);
        assert!(sol.newton_iterations <= 6);
    }

    #[test]
    fn flat_seed_falls_back_to_bisection() {
        // derivative of x^3 - x vanishes at 1/sqrt(3)
        let seed = 1.0 / 3.0f64.sqrt();
        let sol = SOLVER
            .solve(|x| (x * x * x - x - 0.5, 3.0 * x * x - 1.0), seed, 0.0, 2.0)
            .unwrap();
        assert!(sol.used_bisection);
        assert!((sol.root.powi(3) - sol.root - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change_is_none() {
        assert!(SOLVER.solve(|x| (x * x + 1.0, 0.0), 0.0, -1.0, 1.0).is_none());
    }
}
