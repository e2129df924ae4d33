//! File formats and the command-line front end for `vpcstereo-core`.
//!
//! * [`camera_file`]: camera-parameter JSON.
//! * [`lut_file`]: the binary `VPCLUT1` remap-table format.
//! * [`image_io`]: grayscale PNG input and output.
//! * [`scene_file`] and [`sweep`]: render scenes and depth-sweep configs.
//! * [`report`]: error CSV, ASCII PLY and the sweep summary.
//! * [`cli`]: the `vpcstereo` subcommands.

#![forbid(unsafe_code)]

pub mod camera_file;
pub mod cli;
pub mod error;
pub mod image_io;
pub mod lut_file;
pub mod report;
pub mod scene_file;
pub mod sweep;

pub use camera_file::CameraFile;
pub use error::{Error, Result};
