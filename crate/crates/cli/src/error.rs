use std::path::PathBuf;

use vpcstereo_core::camera::CameraError;
use vpcstereo_core::experiment::ExperimentError;
use vpcstereo_core::scene::SceneError;
use vpcstereo_core::stereo::StereoError;
use vpcstereo_core::vpc::VpcError;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Camera(#[from] CameraError),
    #[error(transparent)]
    Vpc(#[from] VpcError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Stereo(#[from] StereoError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    /// A self-check or run produced no usable numbers.
    #[error("{0}")]
    Check(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for usage errors, 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => exit::USAGE,
            Error::Check(_) => exit::NUMERIC,
            Error::Camera(e) => camera_code(e),
            Error::Vpc(VpcError::Camera(e)) => camera_code(e),
            Error::Stereo(e) => stereo_code(e),
            Error::Experiment(ExperimentError::Camera(e)) => camera_code(e),
            Error::Experiment(ExperimentError::Vpc(VpcError::Camera(e))) => camera_code(e),
            Error::Experiment(ExperimentError::Stereo(e)) => stereo_code(e),
            _ => exit::DATA,
        }
    }
}

fn camera_code(e: &CameraError) -> i32 {
    match e {
        CameraError::NoConvergence => exit::NUMERIC,
        _ => exit::DATA,
    }
}

fn stereo_code(e: &StereoError) -> i32 {
    match e {
        StereoError::EmptyAfterFilter | StereoError::Underdetermined(_) => exit::NUMERIC,
        _ => exit::DATA,
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
