//! Sweep artifacts: the error CSV, ASCII PLY clouds and the fit summary.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vpcstereo_core::stereo::{DepthErrorReport, PointCloud};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "distance_baselines",
    "model",
    "texture",
    "rms_m",
    "stddev_m",
    "variance_m2",
    "n_points",
    "seed",
];

/// One CSV row. Failed cells keep their key columns and leave the metrics
/// empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub distance_baselines: f64,
    pub model: String,
    pub texture: String,
    pub rms_m: Option<f64>,
    pub stddev_m: Option<f64>,
    pub variance_m2: Option<f64>,
    pub n_points: Option<usize>,
    pub seed: u64,
}

impl ErrorRow {
    pub fn ok(model: &str, texture: &str, report: &DepthErrorReport) -> Self {
        Self {
            distance_baselines: report.distance_baselines,
            model: model.to_string(),
            texture: texture.to_string(),
            rms_m: Some(report.rms_m),
            stddev_m: Some(report.stddev_m),
            variance_m2: Some(report.variance_m2),
            n_points: Some(report.n_points),
            seed: report.seed,
        }
    }

    pub fn failed(distance_baselines: f64, model: &str, texture: &str, seed: u64) -> Self {
        Self {
            distance_baselines,
            model: model.to_string(),
            texture: texture.to_string(),
            rms_m: None,
            stddev_m: None,
            variance_m2: None,
            n_points: None,
            seed,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.rms_m.is_some()
    }
}

/// Serialized appender; the header is written once on creation.
pub struct CsvAppender<W: Write> {
    inner: csv::Writer<W>,
}

impl CsvAppender<std::fs::File> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        Self::new(file)
    }
}

impl<W: Write> CsvAppender<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(CSV_HEADER)?;
        Ok(Self { inner })
    }

    pub fn append(&mut self, row: &ErrorRow) -> Result<()> {
        self.inner.serialize(row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush().map_err(|e| Error::io("<csv>", e))?;
        self.inner
            .into_inner()
            .map_err(|e| Error::io("<csv>", e.into_error()))
    }
}

pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<ErrorRow>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_ply(cloud: &PointCloud, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", cloud.len())?;
    writeln!(out, "property float x")?;
    writeln!(out, "property float y")?;
    writeln!(out, "property float z")?;
    writeln!(out, "end_header")?;
    for p in &cloud.points {
        writeln!(out, "{} {} {}", p.x as f32, p.y as f32, p.z as f32)?;
    }
    Ok(())
}

pub fn save_ply(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_ply(cloud, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Quadratic `rms ≈ c0 + c1·D + c2·D²` for one model, fitted to the
/// texture-averaged RMS per distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: String,
    /// `(distance_baselines, mean rms_m over textures)`.
    pub mean_rms: Vec<(f64, f64)>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub residual_rms_m: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub models: Vec<ModelSummary>,
    pub cells: usize,
    pub failed_cells: usize,
}
