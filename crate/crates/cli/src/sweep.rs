//! Depth-sweep configuration and runner.
//!
//! ```json
//! {
//!   "rig": {"baseline_m": 0.2, "divergence_deg": 90, "vpc_fov_deg": 60,
//!           "vpc_width": 200, "vpc_height": 200},
//!   "distances": [5, 10, 15, 20, 25],
//!   "textures": ["checkerboard", "noise", "radial"],
//!   "models": [{"name": "atan", "left": "sim_atan.json"}],
//!   "reference": true,
//!   "seed": 42,
//!   "output_dir": "sweep_default"
//! }
//! ```
//!
//! Camera paths are relative to the config file. `right` defaults to
//! `left`. Optional `matcher` and `texture` objects override single fields
//! of the defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vpcstereo_core::camera::CameraModel;
use vpcstereo_core::experiment::{
    run_cell, run_reference_cell, CellResult, ExperimentError, PreparedRig, SimulationSetup,
};
use vpcstereo_core::image::Image;
use vpcstereo_core::rig::{make_stereo_vpcs, StereoRig, StereoVpcs};
use vpcstereo_core::stereo::{fit_error_curve, MatcherParams};
use vpcstereo_core::texture::{TextureKind, TextureParams};

use crate::camera_file::CameraFile;
use crate::error::{Error, Result};
use crate::report::{save_ply, CsvAppender, ErrorRow, ModelSummary, Summary};

pub const REFERENCE: &str = "reference";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigConfig {
    #[serde(default = "d_baseline")]
    pub baseline_m: f64,
    #[serde(default = "d_divergence")]
    pub divergence_deg: f64,
    #[serde(default = "d_vpc_fov")]
    pub vpc_fov_deg: f64,
    #[serde(default = "d_vpc_size")]
    pub vpc_width: u32,
    #[serde(default = "d_vpc_size")]
    pub vpc_height: u32,
}

fn d_baseline() -> f64 {
    0.2
}
fn d_divergence() -> f64 {
    90.0
}
fn d_vpc_fov() -> f64 {
    60.0
}
fn d_vpc_size() -> u32 {
    200
}
fn d_true() -> bool {
    true
}
fn d_textures() -> Vec<String> {
    TextureKind::ALL.iter().map(|t| t.name().to_string()).collect()
}
fn d_output() -> PathBuf {
    PathBuf::from("sweep")
}

impl Default for RigConfig {
    fn default() -> Self {
        Self {
            baseline_m: d_baseline(),
            divergence_deg: d_divergence(),
            vpc_fov_deg: d_vpc_fov(),
            vpc_width: d_vpc_size(),
            vpc_height: d_vpc_size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub name: String,
    pub left: PathBuf,
    #[serde(default)]
    pub right: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatcherConfig {
    pub block_size: Option<usize>,
    pub max_disparity: Option<usize>,
    pub uniqueness_ratio: Option<f64>,
    pub lr_tolerance: Option<f64>,
    pub texture_threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextureConfig {
    pub size: Option<usize>,
    pub checker_squares: Option<usize>,
    pub noise_min_cycles: Option<f64>,
    pub noise_max_cycles: Option<f64>,
    pub noise_components: Option<usize>,
    pub radial_cycles: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub rig: RigConfig,
    pub distances: Vec<f64>,
    #[serde(default = "d_textures")]
    pub textures: Vec<String>,
    #[serde(default)]
    pub models: Vec<ModelEntry>,
    #[serde(default = "d_true")]
    pub reference: bool,
    #[serde(default)]
    pub matcher: MatcherConfig,
    #[serde(default)]
    pub texture: TextureConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub supersample: Option<u32>,
    #[serde(default)]
    pub extent_ratio: Option<f64>,
    #[serde(default)]
    pub vicinity_ratio: Option<f64>,
    #[serde(default)]
    pub background: Option<f32>,
    /// Relative to the command's output directory.
    #[serde(default = "d_output")]
    pub output_dir: PathBuf,
    #[serde(default = "d_true")]
    pub write_ply: bool,
}

/// A validated sweep with its cameras loaded.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub setup: SimulationSetup,
    pub distances: Vec<f64>,
    pub textures: Vec<TextureKind>,
    pub models: Vec<(String, CameraModel, CameraModel)>,
    pub reference: bool,
    pub output_dir: PathBuf,
    pub write_ply: bool,
}

impl SweepConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: SweepConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for m in &mut cfg.models {
            m.left = base.join(&m.left);
            m.right = m.right.as_ref().map(|r| base.join(r));
        }
        Ok(cfg)
    }

    pub fn setup(&self) -> Result<SimulationSetup> {
        let mut s = SimulationSetup {
            baseline_m: self.rig.baseline_m,
            divergence: self.rig.divergence_deg.to_radians(),
            vpc_fov: self.rig.vpc_fov_deg.to_radians(),
            vpc_resolution: (self.rig.vpc_width, self.rig.vpc_height),
            ..SimulationSetup::default()
        };
        let m = &self.matcher;
        let d = MatcherParams::default();
        s.matcher = MatcherParams {
            block_size: m.block_size.unwrap_or(d.block_size),
            max_disparity: m.max_disparity.unwrap_or(d.max_disparity),
            uniqueness_ratio: m.uniqueness_ratio.unwrap_or(d.uniqueness_ratio),
            lr_tolerance: m.lr_tolerance.unwrap_or(d.lr_tolerance),
            texture_threshold: m.texture_threshold.unwrap_or(d.texture_threshold),
        };
        s.matcher.validate()?;
        let t = &self.texture;
        let d = TextureParams::default();
        s.texture = TextureParams {
            size: t.size.unwrap_or(d.size),
            checker_squares: t.checker_squares.unwrap_or(d.checker_squares),
            noise_min_cycles: t.noise_min_cycles.unwrap_or(d.noise_min_cycles),
            noise_max_cycles: t.noise_max_cycles.unwrap_or(d.noise_max_cycles),
            noise_components: t.noise_components.unwrap_or(d.noise_components),
            radial_cycles: t.radial_cycles.unwrap_or(d.radial_cycles),
            seed: t.seed.unwrap_or(d.seed),
        };
        if s.texture.size < 2 {
            return Err(Error::Config("texture size must be at least 2".into()));
        }
        s.seed = self.seed.unwrap_or(s.seed);
        s.supersample = self.supersample.unwrap_or(s.supersample);
        s.extent_ratio = self.extent_ratio.unwrap_or(s.extent_ratio);
        s.vicinity_ratio = self.vicinity_ratio.unwrap_or(s.vicinity_ratio);
        s.background = self.background.unwrap_or(s.background);
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(s.baseline_m) {
            return Err(Error::Config("rig.baseline_m must be positive".into()));
        }
        if !(s.divergence.is_finite() && s.divergence >= 0.0 && s.divergence < std::f64::consts::PI) {
            return Err(Error::Config("rig.divergence_deg must lie in [0, 180)".into()));
        }
        if !(positive(s.extent_ratio) && positive(s.vicinity_ratio)) {
            return Err(Error::Config("extent_ratio and vicinity_ratio must be positive".into()));
        }
        if s.supersample == 0 {
            return Err(Error::Config("supersample must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&s.background) {
            return Err(Error::Config("background must lie in [0, 1]".into()));
        }
        Ok(s)
    }

    /// Validates everything and loads the camera files.
    pub fn resolve(&self) -> Result<Sweep> {
        let setup = self.setup()?;
        if self.distances.is_empty() {
            return Err(Error::Config("`distances` is empty".into()));
        }
        if let Some(d) = self.distances.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::Config(format!("distances must be positive, got {d}")));
        }
        if self.textures.is_empty() {
            return Err(Error::Config("`textures` is empty".into()));
        }
        let textures = self
            .textures
            .iter()
            .map(|t| t.parse::<TextureKind>().map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if self.models.is_empty() && !self.reference {
            return Err(Error::Config("nothing to run: no models and no reference".into()));
        }
        let mut names = BTreeSet::new();
        let mut models = Vec::new();
        for m in &self.models {
            if m.name == REFERENCE || m.name.is_empty() || !names.insert(m.name.as_str()) {
                return Err(Error::Config(format!(
                    "model names must be unique, non-empty and not `{REFERENCE}`: `{}`",
                    m.name
                )));
            }
            let left = CameraFile::load_model(&m.left)?;
            let right = match &m.right {
                Some(r) => CameraFile::load_model(r)?,
                None => left.clone(),
            };
            models.push((m.name.clone(), left, right));
        }
        Ok(Sweep {
            setup,
            distances: self.distances.clone(),
            textures,
            models,
            reference: self.reference,
            output_dir: self.output_dir.clone(),
            write_ply: self.write_ply,
        })
    }
}

/// Rows in output order plus the summary.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<ErrorRow>,
    pub summary: Summary,
    pub output_dir: PathBuf,
}

impl SweepOutcome {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| !r.is_ok())
    }
}

fn ply_name(model: &str, texture: TextureKind, distance: f64) -> String {
    format!("{model}_{}_D{distance}.ply", texture.name())
}

/// The VPC pair the reference cameras copy. Poses and intrinsics depend only
/// on the rig geometry.
fn reference_vpcs(setup: &SimulationSetup) -> std::result::Result<StereoVpcs, ExperimentError> {
    let fe = SimulationSetup::default_fisheye();
    let rig = StereoRig::divergent(fe.clone(), fe, setup.baseline_m, setup.divergence)?;
    Ok(make_stereo_vpcs(&rig, setup.vpc_fov, setup.vpc_resolution)?)
}

enum Pipeline {
    Fisheye(std::result::Result<PreparedRig, ExperimentError>),
    Reference(std::result::Result<StereoVpcs, ExperimentError>),
}

struct Cell<'a> {
    distance: f64,
    model: &'a str,
    pipeline: &'a Pipeline,
    texture: TextureKind,
}

/// Runs every (distance, model, texture) cell and writes the CSV, PLY clouds
/// and `summary.json` under `out_root/output_dir`.
pub fn run_sweep(sweep: &Sweep, out_root: &Path) -> Result<SweepOutcome> {
    let setup = &sweep.setup;
    let out = out_root.join(&sweep.output_dir);
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let mut pipelines: Vec<(String, Pipeline)> = sweep
        .models
        .par_iter()
        .map(|(name, l, r)| {
            (
                name.clone(),
                Pipeline::Fisheye(PreparedRig::new(setup, l.clone(), r.clone())),
            )
        })
        .collect();
    if sweep.reference {
        pipelines.push((REFERENCE.into(), Pipeline::Reference(reference_vpcs(setup))));
    }
    let textures: Vec<(TextureKind, Image)> = sweep
        .textures
        .iter()
        .map(|&k| (k, setup.texture_image(k)))
        .collect();

    let mut cells = Vec::new();
    for &distance in &sweep.distances {
        for (name, pipeline) in &pipelines {
            for &(texture, _) in &textures {
                cells.push(Cell {
                    distance,
                    model: name,
                    pipeline,
                    texture,
                });
            }
        }
    }

    let results: Vec<std::result::Result<CellResult, ExperimentError>> = cells
        .par_iter()
        .map(|c| {
            let tex = &textures.iter().find(|(k, _)| *k == c.texture).expect("listed").1;
            match c.pipeline {
                Pipeline::Fisheye(Ok(p)) => run_cell(setup, p, c.distance, tex),
                Pipeline::Reference(Ok(v)) => run_reference_cell(setup, v, c.distance, tex),
                Pipeline::Fisheye(Err(e)) | Pipeline::Reference(Err(e)) => Err(e.clone()),
            }
        })
        .collect();

    let mut csv = CsvAppender::create(out.join("errors.csv"))?;
    let mut rows = Vec::with_capacity(cells.len());
    for (cell, result) in cells.iter().zip(&results) {
        let row = match result {
            Ok(r) => {
                if sweep.write_ply {
                    save_ply(&r.cloud, out.join(ply_name(cell.model, cell.texture, cell.distance)))?;
                }
                ErrorRow::ok(cell.model, cell.texture.name(), &r.report)
            }
            Err(_) => ErrorRow::failed(cell.distance, cell.model, cell.texture.name(), setup.seed),
        };
        csv.append(&row)?;
        rows.push(row);
    }
    csv.finish()?;

    let summary = summarize(&rows, pipelines.iter().map(|(n, _)| n.as_str()), &sweep.distances);
    let path = out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("plain data serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;

    Ok(SweepOutcome {
        rows,
        summary,
        output_dir: out,
    })
}

/// Texture-averaged RMS per distance and its quadratic fit, per model.
/// Distances where any texture failed are left out of the average.
pub fn summarize<'a>(
    rows: &[ErrorRow],
    models: impl IntoIterator<Item = &'a str>,
    distances: &[f64],
) -> Summary {
    let models = models
        .into_iter()
        .map(|model| {
            let mean_rms: Vec<(f64, f64)> = distances
                .iter()
                .filter_map(|&d| {
                    let cell: Vec<&ErrorRow> = rows
                        .iter()
                        .filter(|r| r.model == model && r.distance_baselines == d)
                        .collect();
                    let rms: Option<Vec<f64>> = cell.iter().map(|r| r.rms_m).collect();
                    let rms = rms.filter(|v| !v.is_empty())?;
                    Some((d, rms.iter().sum::<f64>() / rms.len() as f64))
                })
                .collect();
            let (fit, error) = match fit_error_curve(&mean_rms) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ModelSummary {
                model: model.to_string(),
                c0: fit.map(|f| f.c0),
                c1: fit.map(|f| f.c1),
                c2: fit.map(|f| f.c2),
                residual_rms_m: fit.map(|f| f.residual_rms(&mean_rms)),
                mean_rms,
                error,
            }
        })
        .collect();
    Summary {
        models,
        cells: rows.len(),
        failed_cells: rows.iter().filter(|r| !r.is_ok()).count(),
    }
}
