//! Disparity, triangulation and the depth-error protocol for a rectified
//! (row-aligned) stereo pair.

mod depth;
mod evaluation;
mod fit;
mod matcher;

pub use depth::{
    disparity_to_depth, disparity_to_depth_with, reconstruct_pointcloud, DepthMap, PointCloud,
    DEFAULT_MIN_DISPARITY,
};
pub use evaluation::{
    evaluate_depth_error, sample_indices, DepthErrorReport, TargetPlane, SAMPLE_SIZE,
};
pub use fit::{fit_error_curve, QuadraticFit};
pub use matcher::{compute_disparity, DisparityMap, MatcherParams};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StereoError {
    #[error("inputs differ in size: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("bad parameter: {0}")]
    BadParams(&'static str),
    #[error("no points left after the vicinity filter")]
    EmptyAfterFilter,
    #[error("need at least 3 distinct distances, got {0}")]
    Underdetermined(usize),
}
