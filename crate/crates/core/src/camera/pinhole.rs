use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_fov, check_param, CameraError, PixelPoint, Projection, Ray3};

/// Focal lengths and principal point in pixels, plus the image size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl PinholeIntrinsics {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    ) -> Result<Self, CameraError> {
        for (name, v) in [("fx", fx), ("fy", fy), ("cx", cx), ("cy", cy)] {
            check_param(name, v)?;
        }
        if fx <= 0.0 || fy <= 0.0 {
            return Err(CameraError::InvalidParameter {
                name: "fx/fy",
                reason: "focal lengths must be positive",
            });
        }
        if width == 0 || height == 0 {
            return Err(CameraError::InvalidParameter {
                name: "width/height",
                reason: "image size must be positive",
            });
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(CameraError::InvalidParameter {
                name: "cx/cy",
                reason: "principal point must lie inside the image",
            });
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Square pixels, principal point at `(width/2, height/2)` and a
    /// horizontal field of view of `fov` radians.
    pub fn from_fov(width: u32, height: u32, fov: f64) -> Result<Self, CameraError> {
        if !(fov > 0.0 && fov < core::f64::consts::PI) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "pinhole field of view must be in (0, pi)",
            });
        }
        let f = (width as f64 / 2.0) / (fov / 2.0).tan();
        Self::new(f, f, width as f64 / 2.0, height as f64 / 2.0, width, height)
    }

    /// Pixel to the normalized image plane (`z = 1`).
    #[inline]
    pub fn normalize(&self, pixel: &PixelPoint) -> (f64, f64) {
        ((pixel.u - self.cx) / self.fx, (pixel.v - self.cy) / self.fy)
    }

    #[inline]
    pub fn denormalize(&self, x: f64, y: f64) -> PixelPoint {
        PixelPoint::new(self.fx * x + self.cx, self.fy * y + self.cy)
    }

    /// Back projection with `z_c = 1`: `(u - cx) / fx, (v - cy) / fy, 1`.
    pub fn back_project(&self, pixel: &PixelPoint) -> Ray3 {
        let (x, y) = self.normalize(pixel);
        Ray3(nalgebra::Vector3::new(x, y, 1.0))
    }
}

/// Ideal perspective camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeModel {
    intrinsics: PinholeIntrinsics,
    half_fov: f64,
}

impl PinholeModel {
    /// A pinhole accepts every ray in front of it.
    pub fn new(intrinsics: PinholeIntrinsics) -> Self {
        Self {
            intrinsics,
            half_fov: FRAC_PI_2,
        }
    }

    /// Restricts the accepted rays to `fov / 2` around the axis.
    pub fn with_fov(intrinsics: PinholeIntrinsics, fov: f64) -> Result<Self, CameraError> {
        check_param("fov", fov)?;
        if !(fov > 0.0 && fov <= core::f64::consts::PI) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "pinhole field of view must be in (0, pi]",
            });
        }
        Ok(Self {
            intrinsics,
            half_fov: fov / 2.0,
        })
    }
}

impl Projection for PinholeModel {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        let theta = ray.incidence_angle();
        if ray.z() <= 0.0 {
            return Err(CameraError::OutOfFov {
                theta,
                limit: self.half_fov,
            });
        }
        check_fov(theta, self.half_fov)?;
        Ok(self
            .intrinsics
            .denormalize(ray.x() / ray.z(), ray.y() / ray.z()))
    }

    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        let ray = self.intrinsics.back_project(pixel).normalized();
        if ray.incidence_angle() > self.half_fov + super::ANGLE_EPS {
            return Err(CameraError::OutOfImage {
                u: pixel.u,
                v: pixel.v,
            });
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
