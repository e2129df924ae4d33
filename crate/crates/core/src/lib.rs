//! Fisheye camera models, virtual pinhole camera (VPC) rectification and
//! stereo depth evaluation for orthogonally divergent fisheye rigs.
//!
//! The crate is `no_std` with `alloc`; without `std`, floating point
//! transcendental functions come from `libm`. The `parallel` feature (on by
//! default) pulls in `std` and `rayon` and parallelizes the per-pixel loops.
//! Every row is computed independently, so the thread schedule never changes
//! a result.
//!
//! Module map:
//!
//! * [`camera`]: forward/inverse projection for pinhole, Kannala-Brandt,
//!   Mei, Scaramuzza and ATAN (equidistant) models.
//! * [`vpc`] and [`rig`]: virtual pinhole cameras, remap lookup tables and
//!   rectified stereo pairs from divergent rigs.
//! * [`scene`] and [`texture`]: a ray-cast renderer for a textured plane and
//!   the image-subtraction metric.
//! * [`stereo`]: block matching, triangulation and the depth-error protocol.
//! * [`experiment`]: the simulated depth sweep wiring all of the above.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod camera;
pub mod experiment;
pub mod image;
mod par;
pub mod rig;
pub mod scene;
pub mod solver;
pub mod stereo;
pub mod texture;
pub mod vpc;

pub use camera::{
    AtanModel, CameraError, CameraModel, KannalaBrandtModel, MeiModel, PinholeIntrinsics,
    PinholeModel, PixelPoint, Ray3, ScaramuzzaModel,
};
pub use image::{Image, Mask};
pub use rig::{make_stereo_vpcs, Pose, StereoRig, StereoVpcs};
pub use scene::{image_difference, render_view, PlanarTarget, Scene};
pub use stereo::{
    compute_disparity, disparity_to_depth, evaluate_depth_error, fit_error_curve,
    reconstruct_pointcloud, DepthErrorReport, DepthMap, DisparityMap, MatcherParams, PointCloud,
    QuadraticFit, TargetPlane,
};
pub use texture::TextureKind;
pub use vpc::{build_lut, remap, remap_direct, RemapTable, Remapped, VpcError, VpcSpec};
