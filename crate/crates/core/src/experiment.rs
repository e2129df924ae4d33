//! The simulated depth-quality experiment.
//!
//! A symmetric divergent rig of two fisheye cameras looks at a fronto-parallel
//! textured plane placed `D` baselines in front of the rig midpoint, along
//! the common VPC optical axis. Each cell renders both fisheye views,
//! rectifies them into a VPC pair, matches, triangulates in the left VPC
//! frame and scores the cloud against the true plane. The reference cell
//! renders the same plane directly through pinhole cameras with the VPC
//! intrinsics and poses.

use core::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Point3, Vector3};

use crate::camera::{AtanModel, CameraError, CameraModel, PinholeModel};
use crate::image::{Image, Mask};
use crate::rig::{make_stereo_vpcs, Pose, StereoRig, StereoVpcs};
use crate::scene::{
    image_difference, render_view_supersampled, PlanarTarget, Scene, SceneError,
};
use crate::stereo::{
    compute_disparity, disparity_to_depth, evaluate_depth_error, reconstruct_pointcloud,
    DepthErrorReport, DisparityMap, MatcherParams, PointCloud, StereoError, TargetPlane,
};
use crate::texture::{self, TextureKind, TextureParams};
use crate::vpc::{build_lut, remap, RemapTable, Remapped, VpcError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Vpc(#[from] VpcError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Stereo(#[from] StereoError),
}

/// All knobs of the simulation. Distances are in baseline multiples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSetup {
    pub baseline_m: f64,
    /// Angle between the two optical axes.
    pub divergence: f64,
    pub vpc_fov: f64,
    pub vpc_resolution: (u32, u32),
    pub matcher: MatcherParams,
    pub texture: TextureParams,
    /// Half-extent of the square target as a fraction of its distance.
    pub extent_ratio: f64,
    /// Vicinity filter as a fraction of the target distance.
    pub vicinity_ratio: f64,
    pub background: f32,
    /// Rays per pixel side when rendering. Point-sampled sharp edges alias
    /// differently in the two views.
    pub supersample: u32,
    pub seed: u64,
}

impl Default for SimulationSetup {
    fn default() -> Self {
        Self {
            baseline_m: 0.20,
            divergence: FRAC_PI_2,
            vpc_fov: 60f64.to_radians(),
            vpc_resolution: (200, 200),
            matcher: MatcherParams::default(),
            texture: TextureParams::default(),
            extent_ratio: 1.0,
            vicinity_ratio: 0.2,
            background: 0.5,
            supersample: 4,
            seed: 42,
        }
    }
}

impl SimulationSetup {
    /// The simulated fisheye: ATAN, 180° FOV, inscribed in a 400×400 image.
    pub fn default_fisheye() -> CameraModel {
        AtanModel::inscribed(400, PI)
            .expect("valid default fisheye")
            .into()
    }

    pub fn distance_m(&self, distance_baselines: f64) -> f64 {
        distance_baselines * self.baseline_m
    }

    pub fn texture_image(&self, kind: TextureKind) -> Image {
        texture::generate(kind, &self.texture)
    }

    /// Plane scene for `distance_baselines`, centered on the common optical
    /// axis of `vpcs`.
    pub fn scene(
        &self,
        vpcs: &StereoVpcs,
        distance_baselines: f64,
        texture: Image,
    ) -> Result<Scene, ExperimentError> {
        let d = self.distance_m(distance_baselines);
        let r = &vpcs.world_rotation;
        let midpoint = Point3::from((vpcs.left_center.coords + vpcs.right_center.coords) / 2.0);
        let axis = r * Vector3::z();
        let half = self.extent_ratio * d;
        let target = PlanarTarget::new(midpoint + axis * d, -axis, r * Vector3::x(), half, half, texture)?;
        Ok(Scene::new(target, self.background))
    }

    /// The target plane in the left VPC frame.
    pub fn target_plane(&self, vpcs: &StereoVpcs, distance_baselines: f64) -> TargetPlane {
        let d = self.distance_m(distance_baselines);
        let r_inv = vpcs.world_rotation.inverse();
        let midpoint = (vpcs.left_center.coords + vpcs.right_center.coords) / 2.0;
        let center = midpoint + vpcs.world_rotation * Vector3::z() * d;
        TargetPlane::new(
            Point3::from(r_inv * (center - vpcs.left_center.coords)),
            -Vector3::z(),
            distance_baselines,
        )
    }
}

/// A fisheye rig with its VPC pair and lookup tables, reusable across cells.
#[derive(Debug, Clone)]
pub struct PreparedRig {
    pub rig: StereoRig,
    pub vpcs: StereoVpcs,
    pub left_lut: RemapTable,
    pub right_lut: RemapTable,
}

impl PreparedRig {
    pub fn new(
        setup: &SimulationSetup,
        left: CameraModel,
        right: CameraModel,
    ) -> Result<Self, ExperimentError> {
        let rig = StereoRig::divergent(left, right, setup.baseline_m, setup.divergence)?;
        let vpcs = make_stereo_vpcs(&rig, setup.vpc_fov, setup.vpc_resolution)?;
        let left_lut = build_lut(&vpcs.left, &rig.left_model);
        let right_lut = build_lut(&vpcs.right, &rig.right_model);
        Ok(Self {
            rig,
            vpcs,
            left_lut,
            right_lut,
        })
    }

    /// Rectified left and right views of `scene`.
    pub fn rectified_views(
        &self,
        setup: &SimulationSetup,
        scene: &Scene,
    ) -> Result<(Remapped, Remapped), ExperimentError> {
        let l = render_view_supersampled(scene, &self.rig.left_model, &self.rig.left_pose, setup.supersample);
        let r = render_view_supersampled(scene, &self.rig.right_model, &self.rig.right_pose, setup.supersample);
        Ok((remap(&l, &self.left_lut)?, remap(&r, &self.right_lut)?))
    }
}

/// Pinhole renders with the VPC intrinsics at the VPC poses.
pub fn reference_views(setup: &SimulationSetup, vpcs: &StereoVpcs, scene: &Scene) -> (Image, Image) {
    let model: CameraModel = PinholeModel::new(*vpcs.intrinsics()).into();
    let render = |pose: &Pose| render_view_supersampled(scene, &model, pose, setup.supersample);
    (render(&vpcs.left_pose()), render(&vpcs.right_pose()))
}

/// Output of one (distance, texture) cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub report: DepthErrorReport,
    pub disparity: DisparityMap,
    /// Left VPC frame, all triangulated pixels.
    pub cloud: PointCloud,
}

fn score(
    setup: &SimulationSetup,
    vpcs: &StereoVpcs,
    distance_baselines: f64,
    left: (&Image, &Mask),
    right: (&Image, &Mask),
) -> Result<CellResult, ExperimentError> {
    let disparity = compute_disparity(left.0, right.0, left.1, right.1, &setup.matcher)?;
    let depth = disparity_to_depth(&disparity, vpcs.intrinsics().fx, vpcs.baseline())?;
    let cloud = reconstruct_pointcloud(&depth, vpcs.intrinsics());
    let plane = setup.target_plane(vpcs, distance_baselines);
    let vicinity = setup.vicinity_ratio * setup.distance_m(distance_baselines);
    let report = evaluate_depth_error(&cloud, &plane, vicinity, setup.seed)?;
    Ok(CellResult {
        report,
        disparity,
        cloud,
    })
}

/// Fisheye render, VPC rectification, matching and scoring.
pub fn run_cell(
    setup: &SimulationSetup,
    prepared: &PreparedRig,
    distance_baselines: f64,
    texture: &Image,
) -> Result<CellResult, ExperimentError> {
    let scene = setup.scene(&prepared.vpcs, distance_baselines, texture.clone())?;
    let (l, r) = prepared.rectified_views(setup, &scene)?;
    score(
        setup,
        &prepared.vpcs,
        distance_baselines,
        (&l.image, &l.mask),
        (&r.image, &r.mask),
    )
}

/// The same cell seen by the ideal pinhole pair.
pub fn run_reference_cell(
    setup: &SimulationSetup,
    vpcs: &StereoVpcs,
    distance_baselines: f64,
    texture: &Image,
) -> Result<CellResult, ExperimentError> {
    let scene = setup.scene(vpcs, distance_baselines, texture.clone())?;
    let (l, r) = reference_views(setup, vpcs, &scene);
    let mask = Mask::all_valid(l.width(), l.height());
    score(setup, vpcs, distance_baselines, (&l, &mask), (&r, &mask))
}

/// Mean absolute difference between the rectified left view and the
/// reference pinhole render, over valid rectified pixels.
pub fn rectification_difference(
    setup: &SimulationSetup,
    prepared: &PreparedRig,
    distance_baselines: f64,
    texture: &Image,
) -> Result<f64, ExperimentError> {
    let scene = setup.scene(&prepared.vpcs, distance_baselines, texture.clone())?;
    let (l, _) = prepared.rectified_views(setup, &scene)?;
    let (reference, _) = reference_views(setup, &prepared.vpcs, &scene);
    Ok(image_difference(&l.image, &reference, Some(&l.mask))?)
}
