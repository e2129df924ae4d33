use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use super::{
    check_fov, check_param, ray_from_polar, CameraError, PinholeIntrinsics, PixelPoint,
    Projection, Ray3, ANGLE_EPS,
};

/// Ideal equidistant fisheye: the pixel offset from the principal point is
/// `f·θ` along the azimuth of the ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtanModel {
    fov: f64,
    intrinsics: PinholeIntrinsics,
}

impl AtanModel {
    /// `fov` is the full field of view in radians, `0 < fov <= 2π`.
    pub fn new(fov: f64, intrinsics: PinholeIntrinsics) -> Result<Self, CameraError> {
        check_param("fov", fov)?;
        if !(fov > 0.0 && fov <= TAU) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "must be in (0, 2*pi]",
            });
        }
        Ok(Self { fov, intrinsics })
    }

    /// Square image whose inscribed circle is exactly the field of view.
    pub fn inscribed(size: u32, fov: f64) -> Result<Self, CameraError> {
        let f = (size as f64 / 2.0) / (fov / 2.0);
        let c = size as f64 / 2.0;
        Self::new(fov, PinholeIntrinsics::new(f, f, c, c, size, size)?)
    }

    pub fn fov(&self) -> f64 {
        self.fov
    }
}

impl Projection for AtanModel {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        let theta = ray.incidence_angle();
        check_fov(theta, self.half_fov())?;
        let r = ray.radial_distance();
        let k = &self.intrinsics;
        if r == 0.0 {
            if ray.z() > 0.0 {
                return Ok(PixelPoint::new(k.cx, k.cy));
            }
            // straight backwards: every azimuth maps to the same circle
            return Err(CameraError::OutOfFov {
                theta,
                limit: self.half_fov(),
            });
        }
        // f·θ / sqrt(y²/x² + 1) carries the sign of x once written as f·θ·x/r
        Ok(PixelPoint::new(
            k.cx + k.fx * theta * ray.x() / r,
            k.cy + k.fy * theta * ray.y() / r,
        ))
    }

    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        let (mx, my) = self.intrinsics.normalize(pixel);
        let theta = mx.hypot(my);
        if theta > self.half_fov() + ANGLE_EPS {
            return Err(CameraError::OutOfImage {
                u: pixel.u,
                v: pixel.v,
            });
        }
        Ok(ray_from_polar(theta, mx, my))
    }

    fn half_fov(&self) -> f64 {
        self.fov / 2.0
    }

    fn intrinsics(&self) -> &PinholeIntrinsics {
        &self.intrinsics
    }
}
