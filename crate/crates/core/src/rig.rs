//! Stereo rigs of two fisheye cameras and the rectified VPC pair they yield.
//!
//! Both VPCs of a pair share one world orientation: x along the baseline,
//! y along the rig's vertical axis (made orthogonal to the baseline) and z
//! completing a right-handed frame. Each VPC keeps its fisheye's optical
//! center, so the pair is a parallel-axis stereo camera with the physical
//! baseline.

use nalgebra::{Isometry3, Matrix3, Point3, Rotation3, Translation3, UnitQuaternion, Vector3};
#[allow(unused_imports)]
use num_traits::Float;

use crate::camera::{CameraModel, PinholeIntrinsics};
use crate::vpc::{VpcError, VpcSpec};

/// Rigid camera-to-world transform; the translation is the optical center.
pub type Pose = Isometry3<f64>;

/// Pose at `center` whose optical axis is rotated by `yaw` about the world
/// vertical (+y) axis.
pub fn yawed_pose(center: Vector3<f64>, yaw: f64) -> Pose {
    Isometry3::from_parts(
        Translation3::from(center),
        UnitQuaternion::from_axis_angle(&Vector3::y_axis(), yaw),
    )
}

/// Two fisheye cameras with known poses.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoRig {
    pub left_model: CameraModel,
    pub right_model: CameraModel,
    pub left_pose: Pose,
    pub right_pose: Pose,
}

impl StereoRig {
    pub fn new(
        left_model: CameraModel,
        left_pose: Pose,
        right_model: CameraModel,
        right_pose: Pose,
    ) -> Result<Self, VpcError> {
        let rig = Self {
            left_model,
            right_model,
            left_pose,
            right_pose,
        };
        let b = rig.baseline();
        if !(b.is_finite() && b > 0.0) {
            return Err(VpcError::DegenerateRig("camera centers coincide"));
        }
        Ok(rig)
    }

    /// Symmetric divergent rig: centers at `(∓baseline/2, 0, 0)` and optical
    /// axes yawed by `∓divergence/2`, so they open away from each other.
    pub fn divergent(
        left_model: CameraModel,
        right_model: CameraModel,
        baseline: f64,
        divergence: f64,
    ) -> Result<Self, VpcError> {
        let half = baseline / 2.0;
        Self::new(
            left_model,
            yawed_pose(Vector3::new(-half, 0.0, 0.0), -divergence / 2.0),
            right_model,
            yawed_pose(Vector3::new(half, 0.0, 0.0), divergence / 2.0),
        )
    }

    pub fn baseline(&self) -> f64 {
        (self.right_pose.translation.vector - self.left_pose.translation.vector).norm()
    }

    pub fn left_center(&self) -> Point3<f64> {
        Point3::from(self.left_pose.translation.vector)
    }

    pub fn right_center(&self) -> Point3<f64> {
        Point3::from(self.right_pose.translation.vector)
    }
}

/// A rectified VPC pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoVpcs {
    pub left: VpcSpec,
    pub right: VpcSpec,
    /// Common VPC-to-world rotation.
    pub world_rotation: Rotation3<f64>,
    pub left_center: Point3<f64>,
    pub right_center: Point3<f64>,
}

impl StereoVpcs {
    pub fn baseline(&self) -> f64 {
        (self.right_center - self.left_center).norm()
    }

    /// Shared pinhole intrinsics of both views.
    pub fn intrinsics(&self) -> &PinholeIntrinsics {
        self.left.intrinsics()
    }

    /// Camera-to-world pose of the left VPC (and of a reference pinhole
    /// camera aligned with it).
    pub fn left_pose(&self) -> Pose {
        Isometry3::from_parts(
            Translation3::from(self.left_center.coords),
            UnitQuaternion::from_rotation_matrix(&self.world_rotation),
        )
    }

    pub fn right_pose(&self) -> Pose {
        Isometry3::from_parts(
            Translation3::from(self.right_center.coords),
            UnitQuaternion::from_rotation_matrix(&self.world_rotation),
        )
    }
}

/// Forms a rectified VPC pair of `vpc_fov` (horizontal, radians) and
/// `resolution` over `rig`.
///
/// Errors with [`VpcError::FovExceeded`] if any border pixel of either VPC
/// falls outside its fisheye model's field of view, and with
/// [`VpcError::DegenerateRig`] when the baseline is parallel to the rig's
/// vertical axis or the views would face backwards.
pub fn make_stereo_vpcs(
    rig: &StereoRig,
    vpc_fov: f64,
    resolution: (u32, u32),
) -> Result<StereoVpcs, VpcError> {
    let left_rot = rig.left_pose.rotation.to_rotation_matrix();
    let right_rot = rig.right_pose.rotation.to_rotation_matrix();

    let baseline = rig.right_pose.translation.vector - rig.left_pose.translation.vector;
    let x_axis = baseline / baseline.norm();
    let vertical = left_rot * Vector3::y() + right_rot * Vector3::y();
    let y_raw = vertical - x_axis * vertical.dot(&x_axis);
    let y_norm = y_raw.norm();
    if !(y_norm > 1e-9) {
        return Err(VpcError::DegenerateRig("baseline is parallel to the vertical axis"));
    }
    let y_axis = y_raw / y_norm;
    let z_axis = x_axis.cross(&y_axis);
    let facing = left_rot * Vector3::z() + right_rot * Vector3::z();
    if z_axis.dot(&facing) <= 0.0 {
        return Err(VpcError::DegenerateRig(
            "rectified views would face away from the cameras (left/right swapped?)",
        ));
    }
    let world = Matrix3::from_columns(&[x_axis, y_axis, z_axis]);
    let world_rotation = Rotation3::from_matrix_unchecked(world);

    let intrinsics = PinholeIntrinsics::from_fov(resolution.0, resolution.1, vpc_fov)?;
    let left = VpcSpec::new(intrinsics, left_rot.matrix().transpose() * world)?;
    let right = VpcSpec::new(intrinsics, right_rot.matrix().transpose() * world)?;
    left.check_fov(&rig.left_model, "left")?;
    right.check_fov(&rig.right_model, "right")?;

    Ok(StereoVpcs {
        left,
        right,
        world_rotation,
        left_center: rig.left_center(),
        right_center: rig.right_center(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::AtanModel;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn atan() -> CameraModel {
        AtanModel::inscribed(400, PI).unwrap().into()
    }

    #[test]
    fn divergent_rig_rotates_each_view_by_45_degrees() {
        let rig = StereoRig::divergent(atan(), atan(), 0.2, FRAC_PI_2).unwrap();
        let pair = make_stereo_vpcs(&rig, 60f64.to_radians(), (200, 200)).unwrap();
        let (l_axis, l_angle) = pair.left.rotation().axis_angle().unwrap();
        let (r_axis, r_angle) = pair.right.rotation().axis_angle().unwrap();
        assert!((l_angle - FRAC_PI_4).abs() < 1e-12);
        assert!((r_angle - FRAC_PI_4).abs() < 1e-12);
        // opposite senses about the vertical axis
        assert!((l_axis.y.abs() - 1.0).abs() < 1e-12);
        assert!((l_axis.y + r_axis.y).abs() < 1e-12);

        // world optical axes coincide
        let lw = left_world_axis(&rig, &pair.left, true);
        let rw = left_world_axis(&rig, &pair.right, false);
        assert!(lw.angle(&rw) < 1e-9);
        assert!((pair.baseline() - 0.2).abs() < 1e-15);
    }

    fn left_world_axis(rig: &StereoRig, vpc: &VpcSpec, left: bool) -> Vector3<f64> {
        let pose = if left { rig.left_pose } else { rig.right_pose };
        pose.rotation * (vpc.rotation() * Vector3::z())
    }

    #[test]
    fn parallel_rig_gives_identity() {
        let rig = StereoRig::divergent(atan(), atan(), 0.2, 0.0).unwrap();
        let pair = make_stereo_vpcs(&rig, 1.0, (64, 48)).unwrap();
        assert!((pair.left.rotation().matrix() - Matrix3::identity()).abs().max() < 1e-15);
        assert!((pair.right.rotation().matrix() - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn too_wide_vpc_is_rejected() {
        let rig = StereoRig::divergent(atan(), atan(), 0.2, FRAC_PI_2).unwrap();
        // 45 degrees of rotation plus 50 degrees of half-FOV leaves the fisheye
        assert!(matches!(
            make_stereo_vpcs(&rig, 100f64.to_radians(), (64, 64)),
            Err(VpcError::FovExceeded { .. })
        ));
    }

    #[test]
    fn vertical_baseline_is_degenerate() {
        let up = Vector3::new(0.0, 0.1, 0.0);
        let rig = StereoRig::new(
            atan(),
            yawed_pose(-up, 0.0),
            atan(),
            yawed_pose(up, 0.0),
        )
        .unwrap();
        assert!(matches!(
            make_stereo_vpcs(&rig, 1.0, (32, 32)),
            Err(VpcError::DegenerateRig(_))
        ));
    }

    #[test]
    fn coincident_centers_rejected() {
        assert!(StereoRig::divergent(atan(), atan(), 0.0, FRAC_PI_2).is_err());
    }
}
