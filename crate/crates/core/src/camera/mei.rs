use nalgebra::{Matrix2, Vector2};
#[allow(unused_imports)]
use num_traits::Float;

use super::{
    check_fov, check_param, CameraError, PinholeIntrinsics, PixelPoint, Projection, Ray3,
    ANGLE_EPS,
};

const MAX_ITERATIONS: usize = 50;
const STEP_TOLERANCE: f64 = 1e-12;

/// Unified (sphere) model: the ray is normalized onto the unit sphere, then
/// projected from a center shifted by `xi` along the axis, then distorted
/// with two radial and two tangential terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeiModel {
    pub xi: f64,
    pub k1: f64,
    pub k2: f64,
    pub p1: f64,
    pub p2: f64,
    intrinsics: PinholeIntrinsics,
    half_fov: f64,
}

/// A ray scaled to unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<&Ray3> for UnitSpherePoint {
    fn from(ray: &Ray3) -> Self {
        let n = ray.norm();
        Self {
            x: ray.x() / n,
            y: ray.y() / n,
            z: ray.z() / n,
        }
    }
}

/// Undistorted normalized coordinates and the distortion offset added to them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPoint2 {
    pub xu: f64,
    pub yu: f64,
    pub dx: f64,
    pub dy: f64,
}

impl NormalizedPoint2 {
    /// `m_u + m_d`.
    pub fn distorted(&self) -> (f64, f64) {
        (self.xu + self.dx, self.yu + self.dy)
    }
}

impl MeiModel {
    pub fn new(
        xi: f64,
        [k1, k2]: [f64; 2],
        [p1, p2]: [f64; 2],
        fov: f64,
        intrinsics: PinholeIntrinsics,
    ) -> Result<Self, CameraError> {
        for (name, v) in [("xi", xi), ("k1", k1), ("k2", k2), ("p1", p1), ("p2", p2), ("fov", fov)]
        {
            check_param(name, v)?;
        }
        if xi < 0.0 {
            return Err(CameraError::InvalidParameter {
                name: "xi",
                reason: "must be non-negative",
            });
        }
        if !(fov > 0.0 && fov <= core::f64::consts::TAU) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "must be in (0, 2*pi]",
            });
        }
        Ok(Self {
            xi,
            k1,
            k2,
            p1,
            p2,
            intrinsics,
            half_fov: fov / 2.0,
        })
    }

    /// Distortion offset `m_d` for undistorted normalized coordinates.
    ///
    /// The radial factor uses the squared radius `ρ² = x² + y²`.
    pub fn distortion(&self, xu: f64, yu: f64) -> (f64, f64) {
        let r2 = xu * xu + yu * yu;
        let radial = self.k1 * r2 + self.k2 * r2 * r2;
        let xy = xu * yu;
        (
            xu * radial + 2.0 * self.p1 * xy + self.p2 * (r2 + 2.0 * xu * xu),
            yu * radial + 2.0 * self.p2 * xy + self.p1 * (r2 + 2.0 * yu * yu),
        )
    }

    fn distortion_jacobian(&self, xu: f64, yu: f64) -> Matrix2<f64> {
        let r2 = xu * xu + yu * yu;
        let radial = self.k1 * r2 + self.k2 * r2 * r2;
        let d_radial = self.k1 + 2.0 * self.k2 * r2; // d(radial)/d(r2)
        let dxx = radial + 2.0 * xu * xu * d_radial + 2.0 * self.p1 * yu + 6.0 * self.p2 * xu;
        let dxy = 2.0 * xu * yu * d_radial + 2.0 * self.p1 * xu + 2.0 * self.p2 * yu;
        let dyx = 2.0 * xu * yu * d_radial + 2.0 * self.p2 * yu + 2.0 * self.p1 * xu;
        let dyy = radial + 2.0 * yu * yu * d_radial + 2.0 * self.p2 * xu + 6.0 * self.p1 * yu;
        Matrix2::new(dxx, dxy, dyx, dyy)
    }

    /// Sphere point and its undistorted/distorted normalized coordinates.
    pub fn normalized_point(&self, ray: &Ray3) -> Result<NormalizedPoint2, CameraError> {
        let s = UnitSpherePoint::from(ray);
        let denom = s.z + self.xi;
        if denom <= 0.0 {
            return Err(CameraError::OutOfFov {
                theta: ray.incidence_angle(),
                limit: self.half_fov,
            });
        }
        let xu = s.x / denom;
        let yu = s.y / denom;
        let (dx, dy) = self.distortion(xu, yu);
        Ok(NormalizedPoint2 { xu, yu, dx, dy })
    }

    /// Removes distortion: fixed-point iteration `m_u ← m − m_d(m_u)`,
    /// finished by Newton steps when the fixed point stalls.
    pub fn undistort(&self, mx: f64, my: f64) -> Result<(f64, f64), CameraError> {
        let target = Vector2::new(mx, my);
        let mut mu = target;
        for _ in 0..MAX_ITERATIONS {
            let (dx, dy) = self.distortion(mu.x, mu.y);
            let next = target - Vector2::new(dx, dy);
            let step = (next - mu).norm();
            mu = next;
            if !step.is_finite() {
                break;
            }
            if step < STEP_TOLERANCE {
                return Ok((mu.x, mu.y));
            }
        }
        let mut mu = target;
        for _ in 0..MAX_ITERATIONS {
            let (dx, dy) = self.distortion(mu.x, mu.y);
            let residual = mu + Vector2::new(dx, dy) - target;
            let jac = Matrix2::identity() + self.distortion_jacobian(mu.x, mu.y);
            let step = jac
                .try_inverse()
                .ok_or(CameraError::NoConvergence)?
                * residual;
            mu -= step;
            if step.norm() < STEP_TOLERANCE {
                return Ok((mu.x, mu.y));
            }
        }
        Err(CameraError::NoConvergence)
    }

    /// Lifts undistorted normalized coordinates back onto the unit sphere.
    pub fn lift(&self, xu: f64, yu: f64) -> Option<UnitSpherePoint> {
        let r2 = xu * xu + yu * yu;
        let disc = 1.0 + (1.0 - self.xi * self.xi) * r2;
        if disc < 0.0 {
            return None;
        }
        let lambda = (self.xi + disc.sqrt()) / (1.0 + r2);
        Some(UnitSpherePoint {
            x: lambda * xu,
            y: lambda * yu,
            z: lambda - self.xi,
        })
    }
}

impl Projection for MeiModel {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        check_fov(ray.incidence_angle(), self.half_fov)?;
        let (x, y) = self.normalized_point(ray)?.distorted();
        Ok(self.intrinsics.denormalize(x, y))
    }

    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        let out = CameraError::OutOfImage {
            u: pixel.u,
            v: pixel.v,
        };
        let (mx, my) = self.intrinsics.normalize(pixel);
        let (xu, yu) = self.undistort(mx, my)?;
        let s = self.lift(xu, yu).ok_or(out)?;
        let ray = Ray3::new(s.x, s.y, s.z).map_err(|_| out)?;
        if ray.incidence_angle() > self.half_fov + ANGLE_EPS {
            return Err(out);
        }
        Ok(ray)
    }

    fn half_fov(&self) -> f64 {
        self.half_fov
    }

    fn intrinsics(&self) -> &PinholeIntrinsics {
        &self.intrinsics
    }
}
