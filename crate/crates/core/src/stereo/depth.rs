//! Parallel-axis triangulation and lifting to a point cloud.

use alloc::vec::Vec;

use nalgebra::Point3;

use super::{DisparityMap, StereoError};
use crate::camera::PinholeIntrinsics;

/// Disparities at or below this many pixels are treated as invalid.
pub const DEFAULT_MIN_DISPARITY: f64 = 0.1;

/// Per-pixel depth along the optical axis, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<Option<f64>>,
}

impl DepthMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[Option<f64>] {
        &self.data
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|d| d.is_some()).count()
    }
}

/// `z = f·b/d` with the default minimum disparity.
pub fn disparity_to_depth(
    disparity: &DisparityMap,
    focal_px: f64,
    baseline_m: f64,
) -> Result<DepthMap, StereoError> {
    disparity_to_depth_with(disparity, focal_px, baseline_m, DEFAULT_MIN_DISPARITY)
}

pub fn disparity_to_depth_with(
    disparity: &DisparityMap,
    focal_px: f64,
    baseline_m: f64,
    min_disparity: f64,
) -> Result<DepthMap, StereoError> {
    if !(focal_px.is_finite() && focal_px > 0.0) {
        return Err(StereoError::BadParams("focal length must be positive"));
    }
    if !(baseline_m.is_finite() && baseline_m > 0.0) {
        return Err(StereoError::BadParams("baseline must be positive"));
    }
    if !(min_disparity >= 0.0) {
        return Err(StereoError::BadParams("minimum disparity must be non-negative"));
    }
    let fb = focal_px * baseline_m;
    Ok(DepthMap {
        width: disparity.width(),
        height: disparity.height(),
        data: disparity
            .as_slice()
            .iter()
            .map(|d| d.filter(|&d| d > min_disparity).map(|d| fb / d))
            .collect(),
    })
}

/// 3D points in the camera frame of the depth map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point3<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3<f64>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Lifts every valid pixel: `((u−cx)·z/fx, (v−cy)·z/fy, z)`, row-major.
pub fn reconstruct_pointcloud(depth: &DepthMap, k: &PinholeIntrinsics) -> PointCloud {
    let mut points = Vec::with_capacity(depth.valid_count());
    for v in 0..depth.height() {
        for u in 0..depth.width() {
            if let Some(z) = depth.get(u, v) {
                points.push(Point3::new(
                    (u as f64 - k.cx) * z / k.fx,
                    (v as f64 - k.cy) * z / k.fy,
                    z,
                ));
            }
        }
    }
    PointCloud { points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn triangulation_arithmetic() {
        let d = DisparityMap::from_vec(3, 1, vec![Some(20.0), None, Some(0.05)]).unwrap();
        let z = disparity_to_depth(&d, 100.0, 0.2).unwrap();
        assert_eq!(z.get(0, 0), Some(1.0));
        assert_eq!(z.get(1, 0), None);
        assert_eq!(z.get(2, 0), None);
        assert!(disparity_to_depth(&d, 0.0, 0.2).is_err());
        assert!(disparity_to_depth(&d, 100.0, -1.0).is_err());
    }

    #[test]
    fn lifting() {
        let k = PinholeIntrinsics::new(50.0, 50.0, 2.0, 1.0, 200, 3).unwrap();
        let mut data = vec![None; 600];
        data[200 + 2] = Some(2.0); // (2, 1): principal point
        data[200 + 52] = Some(3.0); // one focal length to the right
        let d = DisparityMap::from_vec(200, 3, data).unwrap();
        let depth = disparity_to_depth_with(&d, 1.0, 1.0, 0.0).unwrap();
        // f·b = 1, so depth is 1/d
        let cloud = reconstruct_pointcloud(&depth, &k);
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.points[0], Point3::new(0.0, 0.0, 0.5));
        let p = cloud.points[1];
        let z = 1.0 / 3.0;
        assert!((p.x - z).abs() < 1e-15 && p.y == 0.0 && p.z == z);
    }
}
