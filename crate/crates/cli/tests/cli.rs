use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{GrayImage, Luma};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vpcstereo"))
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out-dir").arg(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gray(path: &Path) -> GrayImage {
    image::open(path).unwrap().to_luma8()
}

fn write_pinhole_vpc(dir: &Path) -> PathBuf {
    // same intrinsics as a 60° VPC at 200×200
    let f = 100.0 / 30f64.to_radians().tan();
    let path = dir.join("pinhole.json");
    std::fs::write(
        &path,
        format!(r#"{{"model":"pinhole","width":200,"height":200,"fx":{f},"fy":{f},"cx":100,"cy":100}}"#),
    )
    .unwrap();
    path
}

#[test]
fn lut_writes_a_checked_table() {
    let dir = TempDir::new().unwrap();
    let cam = repo("configs/sim_atan.json");
    let out = run(dir.path(), &["lut", "--camera", p(&cam), "--out", "atan.lut", "--check"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(dir.path().join("atan.lut")).unwrap();
    assert_eq!(&bytes[..7], b"VPCLUT1");
    assert_eq!(bytes.len(), 15 + 200 * 200 * 8);
    assert_eq!(u32::from_le_bytes(bytes[7..11].try_into().unwrap()), 200);
}

#[test]
fn lut_rejects_mismatched_fisheye_image() {
    let dir = TempDir::new().unwrap();
    let png = dir.path().join("small.png");
    GrayImage::new(100, 100).save(&png).unwrap();
    let cam = repo("configs/sim_atan.json");
    let out = run(
        dir.path(),
        &["lut", "--camera", p(&cam), "--out", "x.lut", "--fisheye", p(&png)],
    );
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("x.lut").exists());
}

#[test]
fn rectify_paths_agree_and_preserve_constant_images() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("fisheye.png");
    GrayImage::from_pixel(400, 400, Luma([128])).save(&input).unwrap();
    let cam = repo("configs/sim_atan.json");
    let d = dir.path();
    assert_eq!(code(&run(d, &["lut", "--camera", p(&cam), "--out", "t.lut", "--yaw-deg", "45"])), 0);
    let via_lut = run(
        d,
        &["rectify", "--camera", p(&cam), "--lut", p(&d.join("t.lut")), "--input", p(&input), "--output", "a.png"],
    );
    assert_eq!(code(&via_lut), 0, "{}", String::from_utf8_lossy(&via_lut.stderr));
    let direct = run(
        d,
        &["rectify", "--camera", p(&cam), "--yaw-deg", "45", "--input", p(&input), "--output", "b.png"],
    );
    assert_eq!(code(&direct), 0);
    let (a, b) = (gray(&d.join("a.png")), gray(&d.join("b.png")));
    assert_eq!(a, b);
    let (ma, mb) = (gray(&d.join("a_mask.png")), gray(&d.join("b_mask.png")));
    assert_eq!(ma, mb);
    assert_eq!(a.dimensions(), (200, 200));
    let mut valid = 0;
    for (px, m) in a.pixels().zip(ma.pixels()) {
        if m[0] == 255 {
            valid += 1;
            assert_eq!(px[0], 128);
        }
    }
    assert!(valid > 0);
}

#[test]
fn rectify_reports_missing_input() {
    let dir = TempDir::new().unwrap();
    let cam = repo("configs/sim_atan.json");
    let out = run(
        dir.path(),
        &["rectify", "--camera", p(&cam), "--input", "does/not/exist.png", "--output", "o.png"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn render_centers_an_on_axis_target() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cam = write_pinhole_vpc(d);
    let scene = d.join("scene.json");
    std::fs::write(&scene, r#"{"distance_m":2,"half_extent_m":2,"texture":"radial","background":0}"#).unwrap();
    let out = run(d, &["render", "--scene", p(&scene), "--camera", p(&cam), "--output", "r.png"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let img = gray(&d.join("r.png"));
    // the radial texture is symmetric about its center
    for (x, y) in [(60, 70), (130, 45), (99, 150)] {
        let a = img.get_pixel(x, y)[0] as i32;
        let b = img.get_pixel(200 - x, 200 - y)[0] as i32;
        assert!((a - b).abs() <= 1, "({x}, {y}): {a} vs {b}");
    }
}

#[test]
fn render_rejects_zero_field_of_view() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cam = d.join("bad.json");
    std::fs::write(
        &cam,
        r#"{"model":"atan","width":100,"height":100,"fx":30,"fy":30,"cx":50,"cy":50,"fov_deg":0}"#,
    )
    .unwrap();
    let scene = repo("configs/scene_checker.json");
    let out = run(d, &["render", "--scene", p(&scene), "--camera", p(&cam), "--output", "r.png"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn rectified_fisheye_render_matches_pinhole_render() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let pin = write_pinhole_vpc(d);
    let atan = repo("configs/sim_atan.json");
    let scene = d.join("scene.json");
    std::fs::write(&scene, r#"{"distance_m":3,"texture":"radial","supersample":2}"#).unwrap();
    for (cam, name) in [(&pin, "pin.png"), (&atan, "fish.png")] {
        let out = run(d, &["render", "--scene", p(&scene), "--camera", p(cam), "--output", name]);
        assert_eq!(code(&out), 0);
    }
    let fish = d.join("fish.png");
    assert_eq!(
        code(&run(d, &["rectify", "--camera", p(&atan), "--input", p(&fish), "--output", "rect.png"])),
        0
    );
    let out = run(
        d,
        &["diff", p(&d.join("rect.png")), p(&d.join("pin.png")), "--mask", p(&d.join("rect_mask.png"))],
    );
    assert_eq!(code(&out), 0);
    let diff: f64 = stdout(&out).trim().parse().unwrap();
    assert!(diff < 0.05, "{diff}");
}

#[test]
fn diff_matches_mean_absolute_difference() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = GrayImage::from_fn(37, 23, |_, _| Luma([rng.random()]));
    let b = GrayImage::from_fn(37, 23, |_, _| Luma([rng.random()]));
    a.save(d.join("a.png")).unwrap();
    b.save(d.join("b.png")).unwrap();
    let expected = a
        .pixels()
        .zip(b.pixels())
        .map(|(x, y)| (x[0] as f64 - y[0] as f64).abs() / 255.0)
        .sum::<f64>()
        / (37.0 * 23.0);
    let out = run(d, &["diff", p(&d.join("a.png")), p(&d.join("b.png"))]);
    let got: f64 = stdout(&out).trim().parse().unwrap();
    assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");

    let same = run(d, &["diff", p(&d.join("a.png")), p(&d.join("a.png"))]);
    assert_eq!(stdout(&same).trim().parse::<f64>().unwrap(), 0.0);

    let white = GrayImage::from_pixel(8, 8, Luma([255]));
    let black = GrayImage::new(8, 8);
    white.save(d.join("w.png")).unwrap();
    black.save(d.join("k.png")).unwrap();
    let inv = run(d, &["diff", p(&d.join("w.png")), p(&d.join("k.png"))]);
    assert_eq!(stdout(&inv).trim().parse::<f64>().unwrap(), 1.0);
}

#[test]
fn diff_rejects_size_mismatch() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    GrayImage::new(8, 8).save(d.join("a.png")).unwrap();
    GrayImage::new(9, 8).save(d.join("b.png")).unwrap();
    let out = run(d, &["diff", p(&d.join("a.png")), p(&d.join("b.png"))]);
    assert_eq!(code(&out), 2);
}

fn write_sweep(dir: &Path, camera: &Path) -> PathBuf {
    let cfg = dir.join("sweep.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"distances":[5],"textures":["noise"],"models":[{{"name":"atan","left":"{}"}}],
                "supersample":1,"output_dir":"run"}}"#,
            camera.display()
        ),
    )
    .unwrap();
    cfg
}

#[test]
fn small_sweep_writes_csv_ply_and_summary() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cfg = write_sweep(d, &repo("configs/sim_atan.json"));
    let out = run(d, &["sweep", p(&cfg)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("run/errors.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "{csv}");
    assert!(lines[1].starts_with("5.0,atan,noise,"));
    assert!(lines[2].starts_with("5.0,reference,noise,"));
    for line in &lines[1..] {
        let rms: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(rms > 0.0 && rms < 0.1, "{line}");
    }
    assert!(d.join("run/atan_noise_D5.ply").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("run/summary.json")).unwrap()).unwrap();
    assert!(summary.is_object());
}

#[test]
fn sweep_rejects_unknown_model_tag() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let cam = d.join("cam.json");
    std::fs::write(
        &cam,
        r#"{"model":"fisheye","width":400,"height":400,"fx":127,"fy":127,"cx":200,"cy":200,"fov_deg":180}"#,
    )
    .unwrap();
    let cfg = write_sweep(d, &cam);
    let out = run(d, &["sweep", p(&cfg)]);
    assert_eq!(code(&out), 2);
    assert!(!d.join("run/errors.csv").exists());
}

#[test]
fn validate_accepts_all_fixtures() {
    let dir = TempDir::new().unwrap();
    let mut files: Vec<PathBuf> = std::fs::read_dir(repo("tables"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files.push(repo("configs/sim_atan.json"));
    let args: Vec<&str> = ["models", "validate"]
        .into_iter()
        .chain(files.iter().map(|f| p(f)))
        .collect();
    let out = run(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().filter(|l| l.contains(": ok")).count(), files.len());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&bin().output().unwrap()), 1);
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), 1);
    assert_eq!(code(&bin().args(["lut", "--camera"]).output().unwrap()), 1);
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(code(&bin().arg("--version").output().unwrap()), 0);
}
