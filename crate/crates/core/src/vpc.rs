//! Virtual pinhole cameras and remap lookup tables.
//!
//! A VPC pixel `p` maps to the fisheye pixel `π_f(R · π_p⁻¹(p))`, where
//! `π_p⁻¹` is pinhole back projection on the `z = 1` plane and `R` rotates the
//! VPC frame into the fisheye camera frame. [`build_lut`] evaluates this once
//! per pixel and caches the result as `f32` source coordinates so it can be
//! reused for every frame; [`remap_direct`] evaluates the same map without a
//! table and produces bit-identical output.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix3, Rotation3, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::camera::{CameraError, CameraModel, PinholeIntrinsics, PixelPoint, Ray3};
use crate::image::{Image, Mask};
use crate::par;

const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum VpcError {
    #[error("rotation is not orthonormal with determinant +1")]
    NotARotation,
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },
    #[error("remap table has {len} entries, expected {expected}")]
    EntryCount { len: usize, expected: usize },
    #[error("remap entry at index {index} lies outside the source image")]
    EntryOutOfBounds { index: usize },
    #[error("requested VPC view is not contained in the {side} fisheye field of view")]
    FovExceeded { side: &'static str },
    #[error("degenerate rig: {0}")]
    DegenerateRig(&'static str),
    #[error(transparent)]
    Camera(#[from] CameraError),
}

/// A virtual pinhole camera: intrinsics plus the rotation from the VPC frame
/// into the fisheye camera frame. Shares the fisheye's optical center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpcSpec {
    intrinsics: PinholeIntrinsics,
    rotation: Rotation3<f64>,
}

impl VpcSpec {
    /// Validates that `rotation` is orthonormal (within 1e-9) with `det = +1`.
    pub fn new(intrinsics: PinholeIntrinsics, rotation: Matrix3<f64>) -> Result<Self, VpcError> {
        if !rotation.iter().all(|v| v.is_finite()) {
            return Err(VpcError::NotARotation);
        }
        let gram = rotation.transpose() * rotation - Matrix3::identity();
        if gram.iter().any(|v| v.abs() > ORTHONORMAL_TOLERANCE)
            || (rotation.determinant() - 1.0).abs() > ORTHONORMAL_TOLERANCE
        {
            return Err(VpcError::NotARotation);
        }
        Ok(Self {
            intrinsics,
            rotation: Rotation3::from_matrix_unchecked(rotation),
        })
    }

    /// Square pixels, centered principal point, `f = (width / 2) / tan(fov / 2)`.
    pub fn from_fov(
        width: u32,
        height: u32,
        fov: f64,
        rotation: Matrix3<f64>,
    ) -> Result<Self, VpcError> {
        Self::new(PinholeIntrinsics::from_fov(width, height, fov)?, rotation)
    }

    pub fn intrinsics(&self) -> &PinholeIntrinsics {
        &self.intrinsics
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.rotation
    }

    pub fn width(&self) -> usize {
        self.intrinsics.width as usize
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height as usize
    }

    /// Ray in the fisheye camera frame for a VPC pixel: `R · π_p⁻¹(p)`.
    pub fn fisheye_ray(&self, pixel: &PixelPoint) -> Ray3 {
        let v: Vector3<f64> = self.rotation * *self.intrinsics.back_project(pixel).as_vector();
        // a rotated finite non-zero vector stays valid
        Ray3::from_vector(v).expect("rotation preserves ray validity")
    }

    /// Fisheye pixel for a VPC pixel, in full precision.
    pub fn source_point(
        &self,
        model: &CameraModel,
        pixel: &PixelPoint,
    ) -> Result<PixelPoint, CameraError> {
        model.project(&self.fisheye_ray(pixel))
    }

    /// Errors with [`VpcError::FovExceeded`] unless every border pixel
    /// projects into `model`'s field of view. `side` names the camera in
    /// the error.
    pub fn check_fov(&self, model: &CameraModel, side: &'static str) -> Result<(), VpcError> {
        let (w, h) = (self.width(), self.height());
        let top_bottom = (0..w).flat_map(|x| [(x, 0), (x, h - 1)]);
        let sides = (0..h).flat_map(|y| [(0, y), (w - 1, y)]);
        for (x, y) in top_bottom.chain(sides) {
            if self.source_point(model, &PixelPoint::new(x as f64, y as f64)).is_err() {
                return Err(VpcError::FovExceeded { side });
            }
        }
        Ok(())
    }
}

/// Table entry for VPC pixel `(x, y)`: the fisheye coordinate rounded to
/// `f32`, or `None` if it cannot be sampled.
fn table_entry(vpc: &VpcSpec, model: &CameraModel, x: usize, y: usize) -> Option<[f32; 2]> {
    let p = vpc
        .source_point(model, &PixelPoint::new(x as f64, y as f64))
        .ok()?;
    let (u, v) = (p.u as f32, p.v as f32);
    let max_u = model.width() as f32 - 1.0;
    let max_v = model.height() as f32 - 1.0;
    (u >= 0.0 && u <= max_u && v >= 0.0 && v <= max_v).then_some([u, v])
}

/// Per-pixel fisheye source coordinates for a VPC, row-major.
///
/// Invalid pixels (outside the model's field of view or the fisheye image)
/// are stored as `(NaN, NaN)`.
#[derive(Debug, Clone)]
pub struct RemapTable {
    width: usize,
    height: usize,
    entries: Vec<[f32; 2]>,
}

impl PartialEq for RemapTable {
    /// Bitwise comparison so that `NaN` entries compare equal.
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a[0].to_bits() == b[0].to_bits() && a[1].to_bits() == b[1].to_bits())
    }
}

impl RemapTable {
    /// Builds a table from raw entries. Each entry is either fully finite
    /// and non-negative, or `(NaN, NaN)`.
    pub fn from_entries(
        width: usize,
        height: usize,
        entries: Vec<[f32; 2]>,
    ) -> Result<Self, VpcError> {
        if entries.len() != width * height {
            return Err(VpcError::EntryCount {
                len: entries.len(),
                expected: width * height,
            });
        }
        for (index, e) in entries.iter().enumerate() {
            let invalid = e[0].is_nan() && e[1].is_nan();
            let valid = e[0].is_finite() && e[1].is_finite() && e[0] >= 0.0 && e[1] >= 0.0;
            if !(invalid || valid) {
                return Err(VpcError::EntryOutOfBounds { index });
            }
        }
        Ok(Self {
            width,
            height,
            entries,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn entries(&self) -> &[[f32; 2]] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, x: usize, y: usize) -> Option<[f32; 2]> {
        let e = self.entries[y * self.width + x];
        (!e[0].is_nan()).then_some(e)
    }

    pub fn valid_count(&self) -> usize {
        self.entries.iter().filter(|e| !e[0].is_nan()).count()
    }

    pub fn validity_mask(&self) -> Mask {
        Mask::from_vec(
            self.width,
            self.height,
            self.entries.iter().map(|e| !e[0].is_nan()).collect(),
        )
        .expect("entry count checked at construction")
    }

    /// Smallest source image size that contains every valid entry.
    pub fn required_source_size(&self) -> (usize, usize) {
        self.entries
            .iter()
            .filter(|e| !e[0].is_nan())
            .fold((0, 0), |(w, h), e| {
                (
                    w.max(e[0].ceil() as usize + 1),
                    h.max(e[1].ceil() as usize + 1),
                )
            })
    }
}

/// Precomputes the remap table of `vpc` over `model`.
pub fn build_lut(vpc: &VpcSpec, model: &CameraModel) -> RemapTable {
    let (width, height) = (vpc.width(), vpc.height());
    let mut entries = vec![[f32::NAN; 2]; width * height];
    par::for_each_row(&mut entries, width, |y, row| {
        for (x, slot) in row.iter_mut().enumerate() {
            if let Some(e) = table_entry(vpc, model, x, y) {
                *slot = e;
            }
        }
    });
    RemapTable {
        width,
        height,
        entries,
    }
}

/// A rectified image with its validity mask. Invalid pixels hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Remapped {
    pub image: Image,
    pub mask: Mask,
}

fn sample_rows(
    width: usize,
    height: usize,
    src: &Image,
    entry: impl Fn(usize, usize) -> Option<[f32; 2]> + Sync + Send,
) -> Remapped {
    let mut px: Vec<(f32, bool)> = vec![(0.0, false); width * height];
    par::for_each_row(&mut px, width, |y, row| {
        for (x, slot) in row.iter_mut().enumerate() {
            if let Some(value) = entry(x, y).and_then(|[u, v]| src.sample(u as f64, v as f64)) {
                *slot = (value, true);
            }
        }
    });
    let (values, valid): (Vec<f32>, Vec<bool>) = px.into_iter().unzip();
    Remapped {
        image: Image::from_vec(width, height, values).expect("sized above"),
        mask: Mask::from_vec(width, height, valid).expect("sized above"),
    }
}

/// Bilinear remap of `src` through `lut`.
///
/// Fails with [`VpcError::DimensionMismatch`] if some valid entry falls
/// outside `src`.
pub fn remap(src: &Image, lut: &RemapTable) -> Result<Remapped, VpcError> {
    let (need_w, need_h) = lut.required_source_size();
    if need_w > src.width() || need_h > src.height() {
        return Err(VpcError::DimensionMismatch {
            expected_width: need_w,
            expected_height: need_h,
            width: src.width(),
            height: src.height(),
        });
    }
    Ok(sample_rows(lut.width, lut.height, src, |x, y| lut.entry(x, y)))
}

/// Rectifies `src` by evaluating the VPC map per pixel, with no table.
pub fn remap_direct(
    src: &Image,
    vpc: &VpcSpec,
    model: &CameraModel,
) -> Result<Remapped, VpcError> {
    check_source(src, model)?;
    Ok(sample_rows(vpc.width(), vpc.height(), src, |x, y| {
        table_entry(vpc, model, x, y)
    }))
}

/// Checks that `src` has exactly the model's image size.
pub fn check_source(src: &Image, model: &CameraModel) -> Result<(), VpcError> {
    let (w, h) = (model.width() as usize, model.height() as usize);
    if src.dimensions() != (w, h) {
        return Err(VpcError::DimensionMismatch {
            expected_width: w,
            expected_height: h,
            width: src.width(),
            height: src.height(),
        });
    }
    Ok(())
}
