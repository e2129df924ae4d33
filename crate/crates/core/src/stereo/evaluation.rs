//! Depth-error statistics against a known target plane.
//!
//! Points farther than `vicinity` from the plane are discarded, then at most
//! [`SAMPLE_SIZE`] of the rest are drawn without replacement using
//! `ChaCha8Rng::seed_from_u64(seed)` and `rand::seq::index::sample`. The
//! residual of a point `p` is `p.z` minus the depth at which the ray through
//! `p` meets the plane.

use alloc::vec::Vec;

use nalgebra::{Point3, Unit, Vector3};
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PointCloud, StereoError};

/// Number of points drawn per evaluation.
pub const SAMPLE_SIZE: usize = 1000;

/// The true target plane, expressed in the point cloud's frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPlane {
    pub point: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
    /// Target distance in baseline multiples, carried into the report.
    pub distance_baselines: f64,
}

impl TargetPlane {
    pub fn new(point: Point3<f64>, normal: Vector3<f64>, distance_baselines: f64) -> Self {
        Self {
            point,
            normal: Unit::new_normalize(normal),
            distance_baselines,
        }
    }

    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        (p - self.point).dot(&self.normal)
    }

    /// Depth (z) where the ray from the origin through `p` meets the plane.
    pub fn depth_along_ray(&self, p: &Point3<f64>) -> Option<f64> {
        let denom = p.coords.dot(&self.normal);
        if denom == 0.0 {
            return None;
        }
        let s = self.point.coords.dot(&self.normal) / denom;
        (s > 0.0).then(|| s * p.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthErrorReport {
    pub distance_baselines: f64,
    pub rms_m: f64,
    pub stddev_m: f64,
    pub variance_m2: f64,
    /// Mean signed residual (bias).
    pub mean_m: f64,
    pub n_points: usize,
    pub seed: u64,
}

/// Indices of the evaluated subset of `n` candidates: all of them in order
/// when `n ≤ SAMPLE_SIZE`, otherwise a seeded draw without replacement.
pub fn sample_indices(n: usize, seed: u64) -> Vec<usize> {
    if n <= SAMPLE_SIZE {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::index::sample(&mut rng, n, SAMPLE_SIZE).into_vec()
}

pub fn evaluate_depth_error(
    cloud: &PointCloud,
    plane: &TargetPlane,
    vicinity: f64,
    seed: u64,
) -> Result<DepthErrorReport, StereoError> {
    if !(vicinity >= 0.0) {
        return Err(StereoError::BadParams("vicinity must be non-negative"));
    }
    let residuals: Vec<f64> = cloud
        .points
        .iter()
        .filter(|p| plane.signed_distance(p).abs() <= vicinity)
        .filter_map(|p| plane.depth_along_ray(p).map(|z| p.z - z))
        .collect();
    if residuals.is_empty() {
        return Err(StereoError::EmptyAfterFilter);
    }
    let picked: Vec<f64> = sample_indices(residuals.len(), seed)
        .into_iter()
        .map(|i| residuals[i])
        .collect();
    let n = picked.len() as f64;
    let mean = picked.iter().sum::<f64>() / n;
    let rms = (picked.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let stddev = (picked.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n).sqrt();
    Ok(DepthErrorReport {
        distance_baselines: plane.distance_baselines,
        rms_m: rms,
        stddev_m: stddev,
        variance_m2: stddev * stddev,
        mean_m: mean,
        n_points: picked.len(),
        seed,
    })
}
