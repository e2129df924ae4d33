//! The `vpcstereo` command line.
//!
//! Input paths are taken as given. Output paths that are relative are
//! placed under `--out-dir` (default: the working directory).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{Rotation3, Vector3};
use vpcstereo_core::camera::CameraModel;
use vpcstereo_core::image::Image;
use vpcstereo_core::rig::yawed_pose;
use vpcstereo_core::scene::{image_difference, render_view_supersampled};
use vpcstereo_core::vpc::{build_lut, check_source, remap, remap_direct, VpcSpec};

use crate::camera_file::CameraFile;
use crate::error::{exit, Error, Result};
use crate::image_io::{load_gray, load_mask, save_gray, save_mask};
use crate::lut_file::{load_lut, save_lut};
use crate::scene_file::SceneFile;
use crate::sweep::{run_sweep, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "vpcstereo", version, about = "Fisheye rectification through virtual pinhole cameras and stereo depth sweeps")]
pub struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a VPC remap table for a camera and write it as a VPCLUT1 file.
    Lut(LutArgs),
    /// Rectify a fisheye PNG into a VPC image plus validity mask.
    Rectify(RectifyArgs),
    /// Ray-cast a textured-plane scene through a camera model.
    Render(RenderArgs),
    /// Print the mean absolute difference of two grayscale images.
    Diff(DiffArgs),
    /// Run a depth-quality sweep from a JSON config.
    Sweep(SweepArgs),
    /// Camera-parameter file utilities.
    #[command(subcommand)]
    Models(ModelsCommand),
}

/// Virtual pinhole camera: square pixels, centered principal point and a
/// rotation (yaw about y, then pitch about x, then roll about z) from the
/// VPC frame into the fisheye frame.
#[derive(Debug, Clone, Args)]
pub struct VpcArgs {
    /// Horizontal field of view in degrees.
    #[arg(long, default_value_t = 60.0)]
    pub fov_deg: f64,
    #[arg(long, default_value_t = 200)]
    pub width: u32,
    #[arg(long, default_value_t = 200)]
    pub height: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub yaw_deg: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub pitch_deg: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub roll_deg: f64,
}

impl VpcArgs {
    pub fn spec(&self) -> Result<VpcSpec> {
        let r = Rotation3::from_axis_angle(&Vector3::y_axis(), self.yaw_deg.to_radians())
            * Rotation3::from_axis_angle(&Vector3::x_axis(), self.pitch_deg.to_radians())
            * Rotation3::from_axis_angle(&Vector3::z_axis(), self.roll_deg.to_radians());
        Ok(VpcSpec::from_fov(
            self.width,
            self.height,
            self.fov_deg.to_radians(),
            *r.matrix(),
        )?)
    }
}

#[derive(Debug, Args)]
pub struct LutArgs {
    /// Camera-parameter JSON file.
    #[arg(long)]
    pub camera: PathBuf,
    #[command(flatten)]
    pub vpc: VpcArgs,
    /// Output table path.
    #[arg(long)]
    pub out: PathBuf,
    /// Reload the written table and verify it against direct evaluation.
    #[arg(long)]
    pub check: bool,
    /// Fisheye PNG the table will be used with; its size must match the camera.
    #[arg(long)]
    pub fisheye: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RectifyArgs {
    #[arg(long)]
    pub camera: PathBuf,
    /// Precomputed table; without it the map is evaluated from the VPC flags.
    #[arg(long)]
    pub lut: Option<PathBuf>,
    #[command(flatten)]
    pub vpc: VpcArgs,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Validity mask output; defaults to `<output stem>_mask.png`.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Optical center as `x,y,z` in meters.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 0.0], allow_negative_numbers = true)]
    pub position: Vec<f64>,
    /// Rotation of the optical axis about the world +y axis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub yaw_deg: f64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Only pixels that are white in this PNG are compared.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    /// Load and validate camera-parameter files.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

struct Ctx<'a> {
    out_dir: PathBuf,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn output(&self, p: &Path) -> Result<PathBuf> {
        let p = if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        };
        if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        Ok(p)
    }

    fn say(&mut self, line: impl std::fmt::Display) {
        // a closed stdout is not worth failing a finished command for
        let _ = writeln!(self.stdout, "{line}");
    }
}

/// Parses `args` and runs the command, returning the process exit code.
/// Errors go to stderr.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    exit::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    exit::USAGE
                }
            };
        }
    };
    match run(cli, stdout) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut ctx = Ctx {
        out_dir: cli.out_dir.unwrap_or_default(),
        stdout,
    };
    match cli.command {
        Command::Lut(a) => cmd_lut(&mut ctx, a),
        Command::Rectify(a) => cmd_rectify(&mut ctx, a),
        Command::Render(a) => cmd_render(&mut ctx, a),
        Command::Diff(a) => cmd_diff(&mut ctx, a),
        Command::Sweep(a) => cmd_sweep(&mut ctx, a),
        Command::Models(ModelsCommand::Validate { files }) => cmd_validate(&mut ctx, files),
    }
}

/// Deterministic pattern covering the whole fisheye image.
fn check_pattern(model: &CameraModel) -> Image {
    Image::from_fn(model.width() as usize, model.height() as usize, |x, y| {
        ((x * 7 + y * 13) % 251) as f32 / 250.0
    })
}

fn cmd_lut(ctx: &mut Ctx, a: LutArgs) -> Result<()> {
    let model = CameraFile::load_model(&a.camera)?;
    if let Some(fisheye) = &a.fisheye {
        check_source(&load_gray(fisheye)?, &model)?;
    }
    let vpc = a.vpc.spec()?;
    vpc.check_fov(&model, "target")?;
    let lut = build_lut(&vpc, &model);
    let out = ctx.output(&a.out)?;
    save_lut(&lut, &out)?;
    ctx.say(format_args!(
        "wrote {} ({}x{}, {} valid)",
        out.display(),
        lut.width(),
        lut.height(),
        lut.valid_count()
    ));
    if a.check {
        let loaded = load_lut(&out)?;
        let pattern = check_pattern(&model);
        let same_table = loaded == build_lut(&vpc, &model);
        let same_image = remap(&pattern, &loaded)? == remap_direct(&pattern, &vpc, &model)?;
        if !(same_table && same_image) {
            return Err(Error::Check(format!(
                "{} does not match direct evaluation",
                out.display()
            )));
        }
        ctx.say("check: ok");
    }
    Ok(())
}

fn cmd_rectify(ctx: &mut Ctx, a: RectifyArgs) -> Result<()> {
    let model = CameraFile::load_model(&a.camera)?;
    let src = load_gray(&a.input)?;
    check_source(&src, &model)?;
    let rectified = match &a.lut {
        Some(p) => remap(&src, &load_lut(p)?)?,
        None => remap_direct(&src, &a.vpc.spec()?, &model)?,
    };
    let out = ctx.output(&a.output)?;
    let mask_path = match &a.mask {
        Some(m) => ctx.output(m)?,
        None => {
            let stem = out.file_stem().unwrap_or_default().to_string_lossy();
            out.with_file_name(format!("{stem}_mask.png"))
        }
    };
    save_gray(&rectified.image, &out)?;
    save_mask(&rectified.mask, &mask_path)?;
    ctx.say(format_args!(
        "wrote {} and {} ({} valid pixels)",
        out.display(),
        mask_path.display(),
        rectified.mask.count_valid()
    ));
    Ok(())
}

fn cmd_render(ctx: &mut Ctx, a: RenderArgs) -> Result<()> {
    let file = SceneFile::load(&a.scene)?;
    let scene = file
        .to_scene()
        .map_err(|e| Error::format(&a.scene, e.to_string()))?;
    let model = CameraFile::load_model(&a.camera)?;
    let [x, y, z]: [f64; 3] = a
        .position
        .as_slice()
        .try_into()
        .map_err(|_| Error::Usage("--position takes x,y,z".into()))?;
    if ![x, y, z, a.yaw_deg].iter().all(|v| v.is_finite()) {
        return Err(Error::Usage("pose values must be finite".into()));
    }
    let pose = yawed_pose(Vector3::new(x, y, z), a.yaw_deg.to_radians());
    let img = render_view_supersampled(&scene, &model, &pose, file.supersample);
    let out = ctx.output(&a.output)?;
    save_gray(&img, &out)?;
    ctx.say(format_args!("wrote {}", out.display()));
    Ok(())
}

fn cmd_diff(ctx: &mut Ctx, a: DiffArgs) -> Result<()> {
    let img_a = load_gray(&a.a)?;
    let img_b = load_gray(&a.b)?;
    let mask = a.mask.as_ref().map(load_mask).transpose()?;
    let d = image_difference(&img_a, &img_b, mask.as_ref())?;
    ctx.say(d);
    Ok(())
}

fn cmd_sweep(ctx: &mut Ctx, a: SweepArgs) -> Result<()> {
    let sweep = SweepConfig::load(&a.config)?.resolve()?;
    let outcome = run_sweep(&sweep, &ctx.out_dir)?;
    for m in &outcome.summary.models {
        match (m.c0, m.c1, m.c2) {
            (Some(c0), Some(c1), Some(c2)) => ctx.say(format_args!(
                "{}: rms(D) = {c0:.6} + {c1:.6}·D + {c2:.6}·D²",
                m.model
            )),
            _ => ctx.say(format_args!(
                "{}: no fit ({})",
                m.model,
                m.error.as_deref().unwrap_or("no data")
            )),
        }
    }
    ctx.say(format_args!(
        "{} cells, {} failed; results in {}",
        outcome.summary.cells,
        outcome.summary.failed_cells,
        outcome.output_dir.display()
    ));
    if outcome.all_failed() {
        return Err(Error::Check("every sweep cell failed".into()));
    }
    Ok(())
}

fn cmd_validate(ctx: &mut Ctx, files: Vec<PathBuf>) -> Result<()> {
    let mut first_err = None;
    for f in files {
        match CameraFile::load_model(&f) {
            Ok(m) => ctx.say(format_args!(
                "{}: ok ({} {}x{}, fov {:.1}°)",
                f.display(),
                m.tag(),
                m.width(),
                m.height(),
                (2.0 * m.half_fov()).to_degrees()
            )),
            Err(e) => {
                ctx.say(format_args!("{}: invalid", f.display()));
                eprintln!("error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}
