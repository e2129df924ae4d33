#[allow(unused_imports)]
use num_traits::Float;

use super::{
    check_fov, check_param, CameraError, PinholeIntrinsics, PixelPoint, Projection, Ray3,
    ANGLE_EPS,
};
use crate::solver::{RootSolution, SafeguardedNewton};

const FORWARD_SOLVER: SafeguardedNewton = SafeguardedNewton {
    max_newton_iterations: 50,
    max_bisection_iterations: 200,
    residual_tolerance: 1e-9,
    step_tolerance: 0.0,
};

/// Omnidirectional polynomial model. Back projection is closed form,
/// `(u, v, f(ρ))` with `f(ρ) = a0 + a1·ρ + a2·ρ² + a3·ρ³ + a4·ρ⁴` and `ρ` the
/// pixel distance to the principal point. Forward projection solves
/// `f(ρ)·ρ_c − z_c·ρ = 0` for `ρ`.
///
/// The focal scale is folded into the polynomial, so the stored intrinsics
/// carry `fx = fy = 1` and only the principal point and image size matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaramuzzaModel {
    a: [f64; 5],
    intrinsics: PinholeIntrinsics,
    half_fov: f64,
    image_radius: f64,
}

/// Outcome of the forward radius solve, exposed for convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSolve {
    /// Image radius in pixels.
    pub rho: f64,
    /// `g(ρ) = f(ρ)·ρ_c − z_c·ρ` at the returned radius, for a unit ray.
    pub residual: f64,
    pub newton_iterations: u32,
    pub used_bisection: bool,
}

impl From<RootSolution> for RadiusSolve {
    fn from(s: RootSolution) -> Self {
        Self {
            rho: s.root,
            residual: s.residual,
            newton_iterations: s.newton_iterations,
            used_bisection: s.used_bisection,
        }
    }
}

impl ScaramuzzaModel {
    /// `a` holds `a0..a4`. Requires `a0 > 0` and that the polynomial reaches
    /// the declared half field of view at some finite radius.
    pub fn new(
        a: [f64; 5],
        fov: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    ) -> Result<Self, CameraError> {
        for (name, &v) in ["a0", "a1", "a2", "a3", "a4"].iter().zip(a.iter()) {
            check_param(name, v)?;
        }
        check_param("fov", fov)?;
        if a[0] <= 0.0 {
            return Err(CameraError::InvalidParameter {
                name: "a0",
                reason: "must be positive",
            });
        }
        if !(fov > 0.0 && fov < core::f64::consts::TAU) {
            return Err(CameraError::InvalidParameter {
                name: "fov",
                reason: "must be in (0, 2*pi)",
            });
        }
        let intrinsics = PinholeIntrinsics::new(1.0, 1.0, cx, cy, width, height)?;
        let half_fov = fov / 2.0;
        let mut model = Self {
            a,
            intrinsics,
            half_fov,
            image_radius: 0.0,
        };
        model.image_radius = model.radius_at_half_fov().ok_or(CameraError::InvalidParameter {
            name: "a",
            reason: "polynomial never reaches the declared field of view",
        })?;
        Ok(model)
    }

    /// First radius where the back-projected ray reaches `half_fov`.
    fn radius_at_half_fov(&self) -> Option<f64> {
        let (s, c) = self.half_fov.sin_cos();
        let h = |rho: f64| self.poly(rho) * s - c * rho;
        let limit = 20.0 * (self.intrinsics.width.max(self.intrinsics.height) as f64);
        let mut lo = 0.0;
        let mut hi = 1.0;
        while h(hi) > 0.0 {
            lo = hi;
            hi += 1.0;
            if hi > limit {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    pub fn coefficients(&self) -> [f64; 5] {
        self.a
    }

    /// Radius of the image circle that corresponds to the half field of view.
    pub fn image_radius(&self) -> f64 {
        self.image_radius
    }

    pub fn poly(&self, rho: f64) -> f64 {
        let [a0, a1, a2, a3, a4] = self.a;
        a0 + rho * (a1 + rho * (a2 + rho * (a3 + rho * a4)))
    }

    fn poly_derivative(&self, rho: f64) -> f64 {
        let [_, a1, a2, a3, a4] = self.a;
        a1 + rho * (2.0 * a2 + rho * (3.0 * a3 + rho * 4.0 * a4))
    }

    /// Solves `f(ρ)·ρ_c − z_c·ρ = 0` for the unit-normalized ray.
    ///
    /// Newton starts from the equidistant guess `R·θ / θ_max` and may take at
    /// most 50 steps; leaving `[0, 1.5·R]` switches to bisection there.
    pub fn solve_radius(&self, ray: &Ray3) -> Result<RadiusSolve, CameraError> {
        let theta = ray.incidence_angle();
        check_fov(theta, self.half_fov)?;
        let unit = ray.normalized();
        let rho_c = unit.radial_distance();
        let z = unit.z();
        let seed = self.image_radius * theta / self.half_fov;
        let g = |rho: f64| {
            (
                self.poly(rho) * rho_c - z * rho,
                self.poly_derivative(rho) * rho_c - z,
            )
        };
        FORWARD_SOLVER
            .solve(g, seed, 0.0, 1.5 * self.image_radius)
            .map(RadiusSolve::from)
            .ok_or(CameraError::NoConvergence)
    }
}

impl Projection for ScaramuzzaModel {
    fn project(&self, ray: &Ray3) -> Result<PixelPoint, CameraError> {
        let k = &self.intrinsics;
        let r = ray.radial_distance();
        if r == 0.0 {
            check_fov(ray.incidence_angle(), self.half_fov)?;
            return Ok(PixelPoint::new(k.cx, k.cy));
        }
        let rho = self.solve_radius(ray)?.rho;
        Ok(PixelPoint::new(
            k.cx + rho * ray.x() / r,
            k.cy + rho * ray.y() / r,
        ))
    }

    fn unproject(&self, pixel: &PixelPoint) -> Result<Ray3, CameraError> {
        let k = &self.intrinsics;
        let (du, dv) = (pixel.u - k.cx, pixel.v - k.cy);
        let rho = du.hypot(dv);
        let out = CameraError::OutOfImage {
            u: pixel.u,
            v: pixel.v,
        };
        if rho > self.image_radius * (1.0 + ANGLE_EPS) {
            return Err(out);
        }
        let ray = Ray3::new(du, dv, self.poly(rho)).map_err(|_| out)?.normalized();
        if ray.incidence_angle() > self.half_fov + 1e-9 {
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

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn table1() -> ScaramuzzaModel {
        ScaramuzzaModel::new([345.1, 0.0, -0.0011, 5.762e-7, -1.398e-9], PI, 538.0, 538.0, 1076, 1076)
            .unwrap()
    }

    #[test]
    fn principal_point_unprojects_to_axis() {
        let r = table1().unproject(&PixelPoint::new(538.0, 538.0)).unwrap();
        assert_eq!((r.x(), r.y(), r.z()), (0.0, 0.0, 1.0));
    }

    #[test]
    fn image_radius_reaches_half_fov() {
        let m = table1();
        // independent estimate from a root finder in numpy: 537.56 px
        assert!((m.image_radius() - 537.56).abs() < 0.01, "{}", m.image_radius());
        let edge = m.unproject(&PixelPoint::new(538.0 + m.image_radius(), 538.0)).unwrap();
        assert!((edge.incidence_angle() - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn forward_solve_is_root_of_g() {
        let m = table1();
        let ray = Ray3::new(0.6, -0.3, 0.5).unwrap();
        let sol = m.solve_radius(&ray).unwrap();
        assert!(sol.residual.abs() < 1e-9);
        assert!(!sol.used_bisection);
        let u = ray.normalized();
        let g = m.poly(sol.rho) * u.radial_distance() - u.z() * sol.rho;
        assert!(g.abs() < 1e-9);
    }

    #[test]
    fn invalid_coefficients_rejected() {
        assert!(ScaramuzzaModel::new([0.0, 0.0, 0.0, 0.0, 0.0], PI, 1.0, 1.0, 4, 4).is_err());
        // a pure constant polynomial is a pinhole and never reaches 90 degrees
        assert!(ScaramuzzaModel::new([100.0, 0.0, 0.0, 0.0, 0.0], PI, 1.0, 1.0, 4, 4).is_err());
        assert!(
            ScaramuzzaModel::new([100.0, f64::INFINITY, 0.0, 0.0, 0.0], 1.0, 1.0, 1.0, 4, 4).is_err()
        );
    }
}
