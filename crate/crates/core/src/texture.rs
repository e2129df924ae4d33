//! Procedural target textures.
//!
//! Three patterns with different spectral content: a hard-edged
//! checkerboard, band-limited noise (a sum of random plane waves) and a
//! radial sinusoid. All values lie in `[0, 1]`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::Image;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TextureKind {
    Checkerboard,
    BandLimitedNoise,
    RadialSinusoid,
}

impl TextureKind {
    pub const ALL: [TextureKind; 3] = [
        TextureKind::Checkerboard,
        TextureKind::BandLimitedNoise,
        TextureKind::RadialSinusoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TextureKind::Checkerboard => "checkerboard",
            TextureKind::BandLimitedNoise => "noise",
            TextureKind::RadialSinusoid => "radial",
        }
    }
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown texture `{0}` (expected checkerboard, noise or radial)")]
pub struct UnknownTexture(pub alloc::string::String);

impl FromStr for TextureKind {
    type Err = UnknownTexture;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "checkerboard" => Ok(TextureKind::Checkerboard),
            "noise" => Ok(TextureKind::BandLimitedNoise),
            "radial" => Ok(TextureKind::RadialSinusoid),
            other => Err(UnknownTexture(other.into())),
        }
    }
}

/// Pattern parameters, in units of the full texture width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureParams {
    /// Side length of the square texture image in texels.
    pub size: usize,
    pub checker_squares: usize,
    /// Spatial frequency band of the noise, in cycles per texture width.
    pub noise_min_cycles: f64,
    pub noise_max_cycles: f64,
    pub noise_components: usize,
    /// Rings between the center and the edge of the radial pattern.
    pub radial_cycles: f64,
    pub seed: u64,
}

impl Default for TextureParams {
    fn default() -> Self {
        Self {
            size: 512,
            checker_squares: 8,
            noise_min_cycles: 3.0,
            noise_max_cycles: 12.0,
            noise_components: 48,
            radial_cycles: 10.0,
            seed: 0x5eed,
        }
    }
}

pub fn generate(kind: TextureKind, params: &TextureParams) -> Image {
    match kind {
        TextureKind::Checkerboard => checkerboard(params.size, params.checker_squares),
        TextureKind::BandLimitedNoise => band_limited_noise(
            params.size,
            params.noise_min_cycles,
            params.noise_max_cycles,
            params.noise_components,
            params.seed,
        ),
        TextureKind::RadialSinusoid => radial_sinusoid(params.size, params.radial_cycles),
    }
}

/// Alternating 0/1 squares, `squares` per side.
pub fn checkerboard(size: usize, squares: usize) -> Image {
    let squares = squares.max(1);
    Image::from_fn(size, size, |x, y| {
        let (i, j) = (x * squares / size, y * squares / size);
        ((i + j) % 2) as f32
    })
}

/// `0.5 + 0.5·cos(2π·cycles·r / (size/2))` around the texture center.
pub fn radial_sinusoid(size: usize, cycles: f64) -> Image {
    let c = (size as f64 - 1.0) / 2.0;
    let half = size as f64 / 2.0;
    Image::from_fn(size, size, |x, y| {
        let r = (x as f64 - c).hypot(y as f64 - c);
        (0.5 + 0.5 * (TAU * cycles * r / half).cos()) as f32
    })
}

struct Wave {
    kx: f64,
    ky: f64,
    phase: f64,
}

/// Sum of `components` plane waves with frequencies drawn uniformly from
/// `[min_cycles, max_cycles]` cycles per texture width, random orientation
/// and phase, rescaled to `[0, 1]`. Deterministic in `seed`.
pub fn band_limited_noise(
    size: usize,
    min_cycles: f64,
    max_cycles: f64,
    components: usize,
    seed: u64,
) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<Wave> = (0..components.max(1))
        .map(|_| {
            let cycles = rng.random_range(min_cycles..=max_cycles);
            let angle = rng.random_range(0.0..PI);
            let k = TAU * cycles / size as f64;
            Wave {
                kx: k * angle.cos(),
                ky: k * angle.sin(),
                phase: rng.random_range(0.0..TAU),
            }
        })
        .collect();
    let mut raw = alloc::vec![0.0f64; size * size];
    par::for_each_row(&mut raw, size, |y, row| {
        for (x, out) in row.iter_mut().enumerate() {
            *out = waves
                .iter()
                .map(|w| (w.kx * x as f64 + w.ky * y as f64 + w.phase).cos())
                .sum();
        }
    });
    let (lo, hi) = raw
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    Image::from_vec(size, size, raw.iter().map(|&v| ((v - lo) / span) as f32).collect())
        .expect("size * size values")
}
