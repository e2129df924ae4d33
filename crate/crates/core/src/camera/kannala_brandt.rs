#[allow(unused_imports)]
use num_traits::Float;

use super::{
    check_fov, check_param, ray_from_polar, CameraError, PinholeIntrinsics, PixelPoint,
    Projection, Ray3, ANGLE_EPS,
};
use crate::solver::SafeguardedNewton;

const MONOTONIC_STEP: f64 = 1e-3;

const INVERSE_SOLVER: SafeguardedNewton = SafeguardedNewton {
    max_newton_iterations: 50,
    max_bisection_iterations: 200,
    residual_tolerance: 0.0,
    step_tolerance: 1e-12,
};

/// Generic polynomial fisheye model with an odd radial law
/// `ρ(θ) = k1·θ + k2·θ³ + k3·θ⁵ + k4·θ⁷ + k5·θ⁹` on the normalized plane,
/// scaled to pixels by `fx`, `fy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KannalaBrandtModel {
    k: [f64; 5],
    intrinsics: PinholeIntrinsics,
    half_fov: f64,
    max_radius: f64,
}

impl KannalaBrandtModel {
    /// Fails when any coefficient is non-finite or `ρ(θ)` is not strictly
    /// increasing on `[0, fov / 2]` (sampled every 1e-3 rad).
    pub fn new(k: [f64; 5], fov: f64, intrinsics: PinholeIntrinsics) -> Result<Self, CameraError> {
        for (name, &v) in ["k1", "k2", "k3", "k4", "k5"].iter().zip(k.iter()) {
            check_param(name, v)?;
        }
        check_param("fov", fov)?;
        if !(fov > 0.0 && fov <= core::f64::consts::TAU) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "must be in (0, 2*pi]",
            });
        }
        let half_fov = fov / 2.0;
        let mut model = Self {
            k,
            intrinsics,
            half_fov,
            max_radius: 0.0,
        };
        let steps = (half_fov / MONOTONIC_STEP).ceil() as usize;
        let mut prev = 0.0;
        for i in 1..=steps {
            let theta = (i as f64 * MONOTONIC_STEP).min(half_fov);
            let rho = model.radial(theta);
            if !(rho > prev) {
                return Err(CameraError::InvalidParameter {
                    name: "k",
                    reason: "radial law must be strictly increasing over the field of view",
                });
            }
            prev = rho;
        }
        model.max_radius = model.radial(half_fov);
        Ok(model)
    }

    pub fn coefficients(&self) -> [f64; 5] {
        self.k
    }

    /// Normalized radius for incidence `theta`.
    pub fn radial(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        let [k1, k2, k3, k4, k5] = self.k;
        theta * (k1 + t2 * (k2 + t2 * (k3 + t2 * (k4 + t2 * k5))))
    }

    fn radial_derivative(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        let [k1, k2, k3, k4, k5] = self.k;
        k1 + t2 * (3.0 * k2 + t2 * (5.0 * k3 + t2 * (7.0 * k4 + t2 * 9.0 * k5)))
    }

    /// Inverts the radial law by Newton's method on `[0, fov / 2]`.
    pub fn incidence_for_radius(&self, rho: f64) -> Result<f64, CameraError> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        let seed = if self.k[0] > 0.0 { rho / self.k[0] } else { 0.5 * self.half_fov };
        INVERSE_SOLVER
            .solve(
                |t| (self.radial(t) - rho, self.radial_derivative(t)),
                seed,
                0.0,
                self.half_fov,
            )
            .map(|s| s.root)
            .ok_or(CameraError::NoConvergence)
    }
}

impl Projection for KannalaBrandtModel {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        let theta = ray.incidence_angle();
        check_fov(theta, self.half_fov)?;
        let r = ray.radial_distance();
        let k = &self.intrinsics;
        if r == 0.0 {
            return Ok(PixelPoint::new(k.cx, k.cy));
        }
        let rho = self.radial(theta);
        Ok(k.denormalize(rho * ray.x() / r, rho * ray.y() / r))
    }

    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        let (mx, my) = self.intrinsics.normalize(pixel);
        let rho = mx.hypot(my);
        if rho > self.max_radius * (1.0 + ANGLE_EPS) {
            return Err(CameraError::OutOfImage {
                u: pixel.u,
                v: pixel.v,
            });
        }
        let theta = self.incidence_for_radius(rho)?;
        Ok(ray_from_polar(theta, mx, my))
    }

    fn half_fov(&self) -> f64 {
        self.half_fov
    }

    fn intrinsics(&self) -> &PinholeIntrinsics {
        &self.intrinsics
    }
}
