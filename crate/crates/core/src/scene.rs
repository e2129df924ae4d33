//! Ray-cast rendering of a textured plane through any camera model.
//!
//! Every pixel is one primary ray (or an `n × n` grid of rays with
//! supersampling) from the camera center along `unproject(pixel)`. A ray
//! that hits the target returns the bilinearly sampled texture value; a miss
//! returns the scene background; pixels the model cannot back-project are 0.
//! The rendered value depends only on the world ray, so two models that
//! agree on a pixel's ray agree on its value.

use alloc::vec;

use nalgebra::{Point3, Unit, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::camera::{CameraModel, PixelPoint};
use crate::image::{Image, Mask};
use crate::par;
use crate::rig::Pose;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("invalid target: {0}")]
    InvalidTarget(&'static str),
    #[error("images differ in size: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("mask selects no pixels")]
    EmptyMask,
}

/// A finite textured rectangle in the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarTarget {
    center: Point3<f64>,
    normal: Unit<Vector3<f64>>,
    right: Unit<Vector3<f64>>,
    down: Unit<Vector3<f64>>,
    half_width: f64,
    half_height: f64,
    texture: Image,
}

impl PlanarTarget {
    /// `right` is the in-plane direction of increasing texture column; rows
    /// increase along `right × normal`.
    pub fn new(
        center: Point3<f64>,
        normal: Vector3<f64>,
        right: Vector3<f64>,
        half_width: f64,
        half_height: f64,
        texture: Image,
    ) -> Result<Self, SceneError> {
        if !(center.iter().chain(normal.iter()).chain(right.iter()).all(|v| v.is_finite())) {
            return Err(SceneError::InvalidTarget("non-finite geometry"));
        }
        if (normal.norm() - 1.0).abs() > 1e-9 {
            return Err(SceneError::InvalidTarget("normal must be unit length"));
        }
        if !(half_width > 0.0 && half_height > 0.0) {
            return Err(SceneError::InvalidTarget("extent must be positive"));
        }
        if texture.width() < 2 || texture.height() < 2 {
            return Err(SceneError::InvalidTarget("texture must be at least 2x2"));
        }
        let normal = Unit::new_normalize(normal);
        let in_plane = right - normal.into_inner() * right.dot(&normal);
        if in_plane.norm() < 1e-9 {
            return Err(SceneError::InvalidTarget("right axis is parallel to the normal"));
        }
        let right = Unit::new_normalize(in_plane);
        let down = Unit::new_normalize(right.cross(&normal));
        Ok(Self {
            center,
            normal,
            right,
            down,
            half_width,
            half_height,
            texture,
        })
    }

    /// Square target at depth `distance` on the world z axis, facing the
    /// origin, texture columns along +x and rows along +y.
    pub fn fronto_parallel(
        distance: f64,
        half_extent: f64,
        texture: Image,
    ) -> Result<Self, SceneError> {
        Self::new(
            Point3::new(0.0, 0.0, distance),
            -Vector3::z(),
            Vector3::x(),
            half_extent,
            half_extent,
            texture,
        )
    }

    pub fn center(&self) -> &Point3<f64> {
        &self.center
    }

    pub fn normal(&self) -> &Unit<Vector3<f64>> {
        &self.normal
    }

    pub fn texture(&self) -> &Image {
        &self.texture
    }

    pub fn with_texture(&self, texture: Image) -> Result<Self, SceneError> {
        Self::new(
            self.center,
            self.normal.into_inner(),
            self.right.into_inner(),
            self.half_width,
            self.half_height,
            texture,
        )
    }

    /// Texture value where the ray `origin + t·dir` (t > 0) hits the
    /// rectangle.
    pub fn hit(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<f32> {
        let denom = dir.dot(&self.normal);
        if denom == 0.0 {
            return None;
        }
        let t = (self.center - origin).dot(&self.normal) / denom;
        if !(t > 0.0) {
            return None;
        }
        let offset = (origin + dir * t) - self.center;
        let lx = offset.dot(&self.right);
        let ly = offset.dot(&self.down);
        if lx.abs() > self.half_width || ly.abs() > self.half_height {
            return None;
        }
        let tu = (lx + self.half_width) / (2.0 * self.half_width)
            * (self.texture.width() as f64 - 1.0);
        let tv = (ly + self.half_height) / (2.0 * self.half_height)
            * (self.texture.height() as f64 - 1.0);
        self.texture.sample(tu, tv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub target: PlanarTarget,
    /// Value returned by rays that miss the target.
    pub background: f32,
}

impl Scene {
    pub fn new(target: PlanarTarget, background: f32) -> Self {
        Self { target, background }
    }

    pub fn shade(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> f32 {
        self.target.hit(origin, dir).unwrap_or(self.background)
    }
}

/// One ray per pixel.
pub fn render_view(scene: &Scene, model: &CameraModel, pose: &Pose) -> Image {
    render_view_supersampled(scene, model, pose, 1)
}

/// `factor × factor` rays per pixel on a regular sub-pixel grid, averaged.
/// Sub-rays outside the model's field of view count as 0.
pub fn render_view_supersampled(
    scene: &Scene,
    model: &CameraModel,
    pose: &Pose,
    factor: u32,
) -> Image {
    let (w, h) = (model.width() as usize, model.height() as usize);
    let n = factor.max(1);
    let origin = Point3::from(pose.translation.vector);
    let mut data = vec![0.0f32; w * h];
    par::for_each_row(&mut data, w, |y, row| {
        for (x, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0f64;
            for j in 0..n {
                for i in 0..n {
                    let du = (i as f64 + 0.5) / n as f64 - 0.5;
                    let dv = (j as f64 + 0.5) / n as f64 - 0.5;
                    let pixel = PixelPoint::new(x as f64 + du, y as f64 + dv);
                    if let Ok(ray) = model.unproject(&pixel) {
                        let dir = pose.rotation * ray.as_vector();
                        acc += scene.shade(&origin, &dir) as f64;
                    }
                }
            }
            *out = if n == 1 {
                acc as f32
            } else {
                (acc / (n * n) as f64) as f32
            };
        }
    });
    Image::from_vec(w, h, data).expect("sized above")
}

/// Mean absolute difference over the pixels selected by `mask` (all pixels
/// when `None`).
pub fn image_difference(a: &Image, b: &Image, mask: Option<&Mask>) -> Result<f64, SceneError> {
    if a.dimensions() != b.dimensions() {
        return Err(SceneError::DimensionMismatch(a.dimensions(), b.dimensions()));
    }
    if let Some(m) = mask {
        if m.dimensions() != a.dimensions() {
            return Err(SceneError::DimensionMismatch(a.dimensions(), m.dimensions()));
        }
    }
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for (i, (&pa, &pb)) in a.as_slice().iter().zip(b.as_slice()).enumerate() {
        if mask.is_none_or(|m| m.as_slice()[i]) {
            sum += (pa as f64 - pb as f64).abs();
            count += 1;
        }
    }
    if count == 0 {
        return Err(SceneError::EmptyMask);
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{AtanModel, PinholeIntrinsics, PinholeModel};
    use crate::texture;
    use core::f64::consts::PI;
    use nalgebra::Isometry3;

    fn scene(texture: Image) -> Scene {
        Scene::new(PlanarTarget::fronto_parallel(2.0, 1.0, texture).unwrap(), 0.25)
    }

    #[test]
    fn center_pixel_sees_texture_center() {
        let tex = Image::from_fn(65, 65, |x, y| if x == 32 && y == 32 { 1.0 } else { 0.5 });
        let model: CameraModel = AtanModel::inscribed(101, PI).unwrap().into();
        // principal point (50.5, 50.5) is not a pixel center; use a pinhole
        let pin: CameraModel =
            PinholeModel::new(PinholeIntrinsics::new(80.0, 80.0, 50.0, 50.0, 101, 101).unwrap())
                .into();
        let img = render_view(&scene(tex.clone()), &pin, &Isometry3::identity());
        assert_eq!(img.get(50, 50), 1.0);
        let atan: CameraModel =
            AtanModel::new(PI, PinholeIntrinsics::new(30.0, 30.0, 50.0, 50.0, 101, 101).unwrap())
                .unwrap()
                .into();
        let img = render_view(&scene(tex), &atan, &Isometry3::identity());
        assert_eq!(img.get(50, 50), 1.0);
        assert_eq!(model.width(), 101);
    }

    #[test]
    fn outside_fov_is_zero_and_misses_are_background() {
        let atan: CameraModel = AtanModel::inscribed(64, PI).unwrap().into();
        let img = render_view(&scene(Image::filled(4, 4, 1.0)), &atan, &Isometry3::identity());
        assert_eq!(img.get(0, 0), 0.0); // corner lies outside the image circle
        assert_eq!(img.get(32, 1), 0.25); // near the rim, looking past the plane
        assert_eq!(img.get(32, 32), 1.0);
    }

    #[test]
    fn rendering_is_linear_in_texture() {
        let tex = texture::radial_sinusoid(64, 3.0);
        let doubled = tex.map(|v| 2.0 * v);
        let pin: CameraModel =
            PinholeModel::new(PinholeIntrinsics::from_fov(48, 48, 1.0).unwrap()).into();
        let mut s1 = scene(tex);
        let mut s2 = scene(doubled);
        s1.background = 0.0;
        s2.background = 0.0;
        let a = render_view(&s1, &pin, &Isometry3::identity());
        let b = render_view(&s2, &pin, &Isometry3::identity());
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((2.0 * x - y).abs() <= 1e-6 * y.abs().max(1.0));
        }
    }

    #[test]
    fn supersampling_of_constant_scene_is_constant() {
        let pin: CameraModel =
            PinholeModel::new(PinholeIntrinsics::from_fov(16, 16, 0.5).unwrap()).into();
        let img = render_view_supersampled(
            &scene(Image::filled(4, 4, 0.75)),
            &pin,
            &Isometry3::identity(),
            3,
        );
        assert!(img.as_slice().iter().all(|&v| (v - 0.75).abs() < 1e-6));
    }

    #[test]
    fn difference_metric() {
        let a = Image::filled(4, 3, 1.0);
        let b = Image::filled(4, 3, 0.0);
        assert_eq!(image_difference(&a, &a, None).unwrap(), 0.0);
        assert_eq!(image_difference(&a, &b, None).unwrap(), 1.0);
        let mut m = Mask::new(4, 3, false);
        assert_eq!(image_difference(&a, &b, Some(&m)), Err(SceneError::EmptyMask));
        m.set(1, 1, true);
        assert_eq!(image_difference(&a, &b, Some(&m)).unwrap(), 1.0);
        assert!(matches!(
            image_difference(&a, &Image::new(3, 4), None),
            Err(SceneError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn target_validation() {
        let tex = Image::filled(4, 4, 0.0);
        assert!(PlanarTarget::fronto_parallel(1.0, 0.0, tex.clone()).is_err());
        assert!(PlanarTarget::new(
            Point3::origin(),
            Vector3::new(0.0, 0.0, 2.0),
            Vector3::x(),
            1.0,
            1.0,
            tex.clone()
        )
        .is_err());
        assert!(PlanarTarget::new(
            Point3::origin(),
            Vector3::z(),
            Vector3::z(),
            1.0,
            1.0,
            tex
        )
        .is_err());
    }
}
