//! Camera models: forward projection (camera-frame ray to pixel) and back
//! projection (pixel to unit ray).
//!
//! Angles are measured from the +z optical axis. A ray whose incidence angle
//! exceeds the model's half field of view is rejected with
//! [`CameraError::OutOfFov`]; the boundary itself is accepted. Pixel
//! coordinates are continuous, with integer values at pixel centers.

mod atan;
mod kannala_brandt;
mod mei;
mod pinhole;
mod scaramuzza;

pub use atan::AtanModel;
pub use kannala_brandt::KannalaBrandtModel;
pub use mei::{MeiModel, NormalizedPoint2, UnitSpherePoint};
pub use pinhole::{PinholeIntrinsics, PinholeModel};
pub use scaramuzza::{RadiusSolve, ScaramuzzaModel};

use core::fmt;

use nalgebra::Vector3;
#[allow(unused_imports)]
use num_traits::Float;

/// Slack on the half-FOV test so that boundary pixels survive a round trip.
pub(crate) const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum CameraError {
    #[error("ray outside field of view (theta = {theta} rad, limit = {limit} rad)")]
    OutOfFov { theta: f64, limit: f64 },
    #[error("pixel ({u}, {v}) outside the valid projection region")]
    OutOfImage { u: f64, v: f64 },
    #[error("iterative solver did not converge")]
    NoConvergence,
    #[error("ray components must be finite and not all zero")]
    InvalidRay,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
}

pub(crate) fn check_param(name: &'static str, value: f64) -> Result<f64, CameraError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CameraError::InvalidParameter {
            name,
            reason: "must be finite",
        })
    }
}

/// A direction in the camera frame. Scale is arbitrary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray3(Vector3<f64>);

impl Ray3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, CameraError> {
        Self::from_vector(Vector3::new(x, y, z))
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self, CameraError> {
        if v.iter().all(|c| c.is_finite()) && v.iter().any(|&c| c != 0.0) {
            Ok(Self(v))
        } else {
            Err(CameraError::InvalidRay)
        }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn z(&self) -> f64 {
        self.0.z
    }

    #[inline]
    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self(self.0 / n)
    }

    pub fn norm(&self) -> f64 {
        (self.0.x * self.0.x + self.0.y * self.0.y + self.0.z * self.0.z).sqrt()
    }

    /// Distance from the optical axis, `sqrt(x² + y²)`.
    #[inline]
    pub fn radial_distance(&self) -> f64 {
        self.0.x.hypot(self.0.y)
    }

    pub fn incidence_angle(&self) -> f64 {
        incidence_angle(self)
    }

    /// Incidence angle paired with the distance from the optical axis.
    pub fn polar(&self) -> PolarProjection {
        PolarProjection {
            theta: self.incidence_angle(),
            rho: self.radial_distance(),
        }
    }

    /// Angle between two rays in radians, stable for nearly parallel rays.
    pub fn angle_to(&self, other: &Ray3) -> f64 {
        let a = self.0 / self.norm();
        let b = other.0 / other.norm();
        let cross = a.cross(&b);
        let cross_norm =
            (cross.x * cross.x + cross.y * cross.y + cross.z * cross.z).sqrt();
        cross_norm.atan2(a.dot(&b))
    }
}

/// `θ = atan2(sqrt(x² + y²), z)`, in `[0, π]`.
pub fn incidence_angle(ray: &Ray3) -> f64 {
    ray.radial_distance().atan2(ray.z())
}

/// A continuous pixel position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
}

impl PixelPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn distance_to(&self, other: &PixelPoint) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }
}

impl fmt::Display for PixelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Incidence angle `theta` and a radial distance `rho` (either the 3D
/// distance from the optical axis or the image radius in pixels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarProjection {
    pub theta: f64,
    pub rho: f64,
}

/// Shared behaviour of all projection models.
pub trait Projection {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError>;
    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError>;
    /// Half field of view in radians, measured from the optical axis.
    fn half_fov(&self) -> f64;
    fn intrinsics(&self) -> &PinholeIntrinsics;
}

pub(crate) fn check_fov(theta: f64, half_fov: f64) -> Result<(), CameraError> {
    if theta > half_fov + ANGLE_EPS {
        Err(CameraError::OutOfFov {
            theta,
            limit: half_fov,
        })
    } else {
        Ok(())
    }
}

/// Builds the unit ray at incidence `theta` whose azimuth follows `(dx, dy)`.
pub(crate) fn ray_from_polar(theta: f64, dx: f64, dy: f64) -> Ray3 {
    let r = dx.hypot(dy);
    if r == 0.0 {
        return Ray3(Vector3::new(0.0, 0.0, 1.0));
    }
    let s = theta.sin() / r;
    Ray3(Vector3::new(s * dx, s * dy, theta.cos()))
}

/// All supported projection models.
#[derive(Debug, Clone, PartialEq)]
pub enum CameraModel {
    Pinhole(PinholeModel),
    KannalaBrandt(KannalaBrandtModel),
    Mei(MeiModel),
    Scaramuzza(ScaramuzzaModel),
    Atan(AtanModel),
}

impl CameraModel {
    fn inner(&self) -> &dyn Projection {
        match self {
            CameraModel::Pinhole(m) => m,
            CameraModel::KannalaBrandt(m) => m,
            CameraModel::Mei(m) => m,
            CameraModel::Scaramuzza(m) => m,
            CameraModel::Atan(m) => m,
        }
    }

    /// Forward projection, the `π_f` of the rectification map.
    pub fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        self.inner().project(ray)
    }

    /// Back projection to a unit-norm ray.
    pub fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        self.inner().unproject(pixel)
    }

    pub fn half_fov(&self) -> f64 {
        self.inner().half_fov()
    }

    pub fn intrinsics(&self) -> &PinholeIntrinsics {
        self.inner().intrinsics()
    }

    pub fn width(&self) -> u32 {
        self.intrinsics().width
    }

    pub fn height(&self) -> u32 {
        self.intrinsics().height
    }

    /// Short tag matching the camera-parameter file's `model` field.
    pub fn tag(&self) -> &'static str {
        match self {
            CameraModel::Pinhole(_) => "pinhole",
            CameraModel::KannalaBrandt(_) => "kannala_brandt",
            CameraModel::Mei(_) => "mei",
            CameraModel::Scaramuzza(_) => "scaramuzza",
            CameraModel::Atan(_) => "atan",
        }
    }
}

macro_rules! impl_from_model {
    ($($variant:ident => $ty:ty),*) => {
        $(impl From<$ty> for CameraModel {
            fn from(m: $ty) -> Self {
                CameraModel::$variant(m)
            }
        })*
    };
}

impl_from_model!(
    Pinhole => PinholeModel,
    KannalaBrandt => KannalaBrandtModel,
    Mei => MeiModel,
    Scaramuzza => ScaramuzzaModel,
    Atan => AtanModel
);

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn incidence_angle_examples() {
        assert_eq!(incidence_angle(&Ray3::new(0.0, 0.0, 1.0).unwrap()), 0.0);
        assert_eq!(incidence_angle(&Ray3::new(1.0, 0.0, 0.0).unwrap()), FRAC_PI_2);
        let r = Ray3::new(1.0, 1.0, 2.0f64.sqrt()).unwrap();
        // dot-product route: acos(z / |P|)
        let oracle = (r.z() / r.norm()).acos();
        assert!((incidence_angle(&r) - oracle).abs() < 1e-15);
        assert!((incidence_angle(&r) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn zero_and_non_finite_rays_rejected() {
        assert_eq!(Ray3::new(0.0, 0.0, 0.0), Err(CameraError::InvalidRay));
        assert_eq!(Ray3::new(f64::NAN, 0.0, 1.0), Err(CameraError::InvalidRay));
    }

    #[test]
    fn backward_ray_has_angle_pi() {
        let r = Ray3::new(0.0, 0.0, -3.0).unwrap();
        assert_eq!(r.incidence_angle(), core::f64::consts::PI);
    }

    #[test]
    fn angle_between_rays() {
        let a = Ray3::new(1.0, 0.0, 0.0).unwrap();
        let b = Ray3::new(0.0, 2.0, 0.0).unwrap();
        assert!((a.angle_to(&b) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(a.angle_to(&a), 0.0);
    }
}
