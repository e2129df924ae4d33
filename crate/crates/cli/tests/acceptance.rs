//! Acceptance criteria A1–A8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vpcstereo::camera_file::CameraFile;
use vpcstereo::lut_file::{load_lut, save_lut};
use vpcstereo_core::camera::{
    AtanModel, CameraModel, Projection, Ray3, ScaramuzzaModel,
};
use vpcstereo_core::experiment::{
    rectification_difference, run_cell, run_reference_cell, PreparedRig, SimulationSetup,
};
use vpcstereo_core::image::Image;
use vpcstereo_core::stereo::{evaluate_depth_error, fit_error_curve, PointCloud, TargetPlane};
use vpcstereo_core::texture::TextureKind;
use vpcstereo_core::vpc::{build_lut, remap, remap_direct};

fn tables() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../tables")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Random ray with incidence angle uniform in `[0, max_theta]`.
fn random_ray(rng: &mut ChaCha8Rng, max_theta: f64) -> Ray3 {
    let theta = rng.random_range(0.0..=max_theta);
    let phi = rng.random_range(0.0..2.0 * PI);
    Ray3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()).unwrap()
}

fn a1() -> Outcome {
    let mut models: Vec<(String, CameraModel)> = ["atan", "kannala_brandt", "mei", "scaramuzza"]
        .iter()
        .map(|m| {
            let p = tables().join(format!("table1_{m}.json"));
            (format!("table1_{m}"), CameraFile::load_model(&p).unwrap())
        })
        .collect();
    models.push(("atan180".into(), AtanModel::inscribed(400, PI).unwrap().into()));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = (0.0f64, String::new());
    let mut failures = 0;
    for (name, model) in &models {
        for _ in 0..1000 {
            let ray = random_ray(&mut rng, 0.95 * model.half_fov());
            let err = model
                .project(&ray)
                .and_then(|p| model.unproject(&p))
                .map(|back| back.angle_to(&ray));
            match err {
                Ok(e) if e < 1e-6 => {
                    if e > worst.0 {
                        worst = (e, name.clone());
                    }
                }
                _ => failures += 1,
            }
        }
    }
    outcome(
        failures == 0,
        format!(
            "{} models x 1000 rays, {failures} failures, worst {:.2e} rad ({})",
            models.len(),
            worst.0,
            worst.1
        ),
    )
}

fn a2() -> Outcome {
    let setup = SimulationSetup::default();
    let fe = SimulationSetup::default_fisheye();
    let prepared = PreparedRig::new(&setup, fe.clone(), fe.clone()).unwrap();
    let vpc = &prepared.vpcs.left;
    let src = Image::from_fn(400, 400, |x, y| {
        (((x as f32) * 0.37).sin() * ((y as f32) * 0.23).cos() * 0.5 + 0.5).clamp(0.0, 1.0)
    });
    let lut = build_lut(vpc, &fe);
    let via_lut = remap(&src, &lut).unwrap();
    let direct = remap_direct(&src, vpc, &fe).unwrap();
    let bits = |img: &Image| img.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    let same = bits(&via_lut.image) == bits(&direct.image) && via_lut.mask == direct.mask;

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("left.lut");
    save_lut(&lut, &path).unwrap();
    let loaded = load_lut(&path).unwrap();
    let entry_bits = |t: &vpcstereo_core::vpc::RemapTable| {
        t.entries()
            .iter()
            .flat_map(|e| [e[0].to_bits(), e[1].to_bits()])
            .collect::<Vec<_>>()
    };
    let round_trip = entry_bits(&loaded) == entry_bits(&lut)
        && (loaded.width(), loaded.height()) == (200, 200);
    outcome(
        same && round_trip,
        format!(
            "remap bit-identical: {same}, save/load bit-exact: {round_trip}, {} valid of {}",
            lut.valid_count(),
            200 * 200
        ),
    )
}

fn a3() -> Outcome {
    let setup = SimulationSetup {
        supersample: 1,
        ..SimulationSetup::default()
    };
    let fe = SimulationSetup::default_fisheye();
    let prepared = PreparedRig::new(&setup, fe.clone(), fe).unwrap();
    let diff = |kind| {
        rectification_difference(&setup, &prepared, 5.0, &setup.texture_image(kind)).unwrap()
    };
    let checker = diff(TextureKind::Checkerboard);
    let noise = diff(TextureKind::BandLimitedNoise);
    outcome(
        checker < 0.02 && noise < 0.005,
        format!("checkerboard {checker:.4} (< 0.02), noise {noise:.5} (< 0.005)"),
    )
}

const DISTANCES: [f64; 5] = [5.0, 10.0, 15.0, 20.0, 25.0];

/// Texture-averaged RMS per distance for the ATAN-rectified and reference pairs.
fn sweep() -> (Vec<f64>, Vec<f64>) {
    let setup = SimulationSetup::default();
    let fe = SimulationSetup::default_fisheye();
    let prepared = PreparedRig::new(&setup, fe.clone(), fe).unwrap();
    let textures: Vec<Image> = TextureKind::ALL
        .iter()
        .map(|&k| setup.texture_image(k))
        .collect();
    let mut atan = Vec::new();
    let mut reference = Vec::new();
    for &d in &DISTANCES {
        let mean = |f: &dyn Fn(&Image) -> f64| textures.iter().map(f).sum::<f64>() / 3.0;
        atan.push(mean(&|t| run_cell(&setup, &prepared, d, t).unwrap().report.rms_m));
        reference.push(mean(&|t| {
            run_reference_cell(&setup, &prepared.vpcs, d, t)
                .unwrap()
                .report
                .rms_m
        }));
    }
    (atan, reference)
}

fn a4(atan: &[f64], reference: &[f64]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for ((d, a), r) in DISTANCES.iter().zip(atan).zip(reference) {
        let ok = *a <= 1.5 * r + 0.001;
        pass &= ok;
        parts.push(format!("D={d}: {a:.4}/{r:.4}{}", if ok { "" } else { " !" }));
    }
    outcome(pass, format!("atan/reference RMS [m] {}", parts.join(", ")))
}

fn a5(atan: &[f64], reference: &[f64]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, rms) in [("atan", atan), ("reference", reference)] {
        let pts: Vec<(f64, f64)> = DISTANCES.iter().copied().zip(rms.iter().copied()).collect();
        let fit = fit_error_curve(&pts).unwrap();
        let mean = rms.iter().sum::<f64>() / rms.len() as f64;
        let growth = fit.eval(25.0) > fit.eval(5.0);
        let rel = fit.residual_rms(&pts) / mean;
        pass &= growth && rel < 0.25;
        parts.push(format!(
            "{name}: fit(25) {:.4} > fit(5) {:.4}: {growth}, residual/mean {rel:.3} (< 0.25)",
            fit.eval(25.0),
            fit.eval(5.0)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn a6() -> Outcome {
    let sigma = 0.005;
    let seed = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let noise = Normal::new(0.0, sigma).unwrap();
    let points: Vec<Point3<f64>> = (0..10_000)
        .map(|_| {
            let (x, y) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let z = 1.0 + noise.sample(&mut rng);
            Point3::new(x * z, y * z, z)
        })
        .collect();
    let cloud = PointCloud::new(points.clone());
    let plane = TargetPlane::new(Point3::new(0.0, 0.0, 1.0), -Vector3::z(), 5.0);
    let report = evaluate_depth_error(&cloud, &plane, 0.2, seed).unwrap();

    // naive recomputation: every point is within 0.2 m of z = 1
    let mut pick_rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = rand::seq::index::sample(&mut pick_rng, points.len(), 1000).into_vec();
    let res: Vec<f64> = idx.iter().map(|&i| points[i].z - 1.0).collect();
    let n = res.len() as f64;
    let mean = res.iter().sum::<f64>() / n;
    let rms = (res.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let std = (res.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();

    let within = (report.stddev_m - sigma).abs() < 0.1 * sigma;
    let exact_var = report.variance_m2 == report.stddev_m * report.stddev_m;
    let agree = (report.rms_m - rms).abs() < 1e-12
        && (report.stddev_m - std).abs() < 1e-12
        && (report.mean_m - mean).abs() < 1e-12
        && report.n_points == 1000;
    outcome(
        within && exact_var && agree,
        format!(
            "std {:.5} m (5 mm ± 10%: {within}), var = std²: {exact_var}, oracle agreement: {agree}",
            report.stddev_m
        ),
    )
}

fn a7() -> Outcome {
    let model = CameraFile::load_model(tables().join("table2_left_scaramuzza.json")).unwrap();
    let CameraModel::Scaramuzza(s) = &model else {
        return outcome(false, "fixture is not a Scaramuzza model");
    };
    let k = *s.intrinsics();
    let radius = s.image_radius();
    let (mut pixels, mut max_iter, mut worst, mut bad) = (0usize, 0u32, 0.0f64, 0usize);
    for v in 0..k.height {
        for u in 0..k.width {
            let (du, dv) = (u as f64 - k.cx, v as f64 - k.cy);
            if du.hypot(dv) > radius {
                continue;
            }
            pixels += 1;
            let ray = s.unproject(&vpcstereo_core::camera::PixelPoint::new(u as f64, v as f64));
            match ray.and_then(|r| s.solve_radius(&r)) {
                Ok(sol) => {
                    max_iter = max_iter.max(sol.newton_iterations);
                    worst = worst.max(sol.residual.abs());
                    if sol.newton_iterations > 20 || sol.used_bisection || !(sol.residual.abs() < 1e-9) {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
    }

    // a non-monotone polynomial that sends Newton out of its bracket
    let adversarial = ScaramuzzaModel::new(
        [180.0, -0.25, -5e-4, 8.5e-5, -3.2e-7],
        182f64.to_radians(),
        200.0,
        200.0,
        400,
        400,
    )
    .unwrap();
    let mut bisected = 0;
    let mut bisection_ok = true;
    for i in 1..=400 {
        let theta = adversarial.half_fov() * i as f64 / 400.0;
        let ray = Ray3::new(theta.sin(), 0.0, theta.cos()).unwrap();
        let sol = adversarial.solve_radius(&ray).unwrap();
        if sol.used_bisection {
            bisected += 1;
            let back = adversarial
                .unproject(&vpcstereo_core::camera::PixelPoint::new(200.0 + sol.rho, 200.0))
                .map(|b| b.angle_to(&ray));
            bisection_ok &= matches!(back, Ok(e) if e < 1e-6);
        }
    }
    outcome(
        bad == 0 && bisected > 0 && bisection_ok,
        format!(
            "{pixels} pixels, max {max_iter} Newton iterations, max |g| {worst:.1e}, {bad} bad; \
             adversarial set: {bisected}/400 rays bisected, round trip ok: {bisection_ok}"
        ),
    )
}

fn a8() -> Outcome {
    let setup = SimulationSetup::default();
    let fe = SimulationSetup::default_fisheye();
    let prepared = PreparedRig::new(&setup, fe.clone(), fe).unwrap();
    let (rig, vpcs) = (&prepared.rig, &prepared.vpcs);
    let k = *vpcs.intrinsics();
    let midpoint = (vpcs.left_center.coords + vpcs.right_center.coords) / 2.0;
    // world point -> fisheye pixel -> fisheye ray -> VPC pixel
    let to_vpc = |p: &Point3<f64>, model: &CameraModel, pose: &vpcstereo_core::rig::Pose, vpc: &vpcstereo_core::vpc::VpcSpec| {
        let local = pose.inverse_transform_point(p);
        let ray = Ray3::from_vector(local.coords).ok()?;
        let back = model.unproject(&model.project(&ray).ok()?).ok()?;
        let c = vpc.rotation().inverse() * back.as_vector();
        if c.z <= 0.0 {
            return None;
        }
        let (u, v) = (k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy);
        let inside = (0.0..=(k.width - 1) as f64).contains(&u) && (0.0..=(k.height - 1) as f64).contains(&v);
        inside.then_some(v)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut n, mut tries, mut worst) = (0, 0, 0.0f64);
    while n < 500 && tries < 100_000 {
        tries += 1;
        let local = Vector3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(0.5..6.0),
        );
        let p = Point3::from(midpoint + vpcs.world_rotation * local);
        let (Some(vl), Some(vr)) = (
            to_vpc(&p, &rig.left_model, &rig.left_pose, &vpcs.left),
            to_vpc(&p, &rig.right_model, &rig.right_pose, &vpcs.right),
        ) else {
            continue;
        };
        n += 1;
        worst = worst.max((vl - vr).abs());
    }
    outcome(
        n == 500 && worst < 0.5,
        format!("{n} points, max |v_left - v_right| = {worst:.2e} px"),
    )
}

fn report(id: &str, title: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let t = start.elapsed();
    let in_time = t <= limit;
    let pass = o.pass && in_time;
    println!(
        "{id} {:<4} {title}: {} [{:.1} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        t.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let secs = Duration::from_secs;
    let mut all = true;
    all &= report("A1", "round-trip projections", secs(5), a1);
    all &= report("A2", "LUT equivalence", secs(5), a2);
    all &= report("A3", "distortion-removal fidelity", secs(30), a3);

    let mut curves = (Vec::new(), Vec::new());
    all &= report("A4", "depth-sweep ordering", secs(300), || {
        curves = sweep();
        a4(&curves.0, &curves.1)
    });
    all &= report("A5", "error growth", secs(300), || a5(&curves.0, &curves.1));
    all &= report("A6", "error-protocol oracle", secs(1), a6);
    all &= report("A7", "Scaramuzza solver", secs(10), a7);
    all &= report("A8", "epipolar contract", secs(2), a8);
    if !all {
        std::process::exit(1);
    }
}
