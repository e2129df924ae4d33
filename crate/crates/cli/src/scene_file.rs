//! Scene JSON for the `render` command.
//!
//! ```json
//! {"distance_baselines": 5, "baseline_m": 0.2, "texture": "checkerboard",
//!  "background": 0.5, "supersample": 1}
//! ```
//!
//! The target is a square fronto-parallel plane centered on the world +z
//! axis. Give either `distance_m` or `distance_baselines` with `baseline_m`.
//! `half_extent_m` defaults to the distance.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vpcstereo_core::scene::{PlanarTarget, Scene};
use vpcstereo_core::texture::{self, TextureKind, TextureParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub distance_m: Option<f64>,
    #[serde(default)]
    pub distance_baselines: Option<f64>,
    #[serde(default)]
    pub baseline_m: Option<f64>,
    pub texture: String,
    #[serde(default)]
    pub half_extent_m: Option<f64>,
    #[serde(default = "default_background")]
    pub background: f32,
    #[serde(default = "default_supersample")]
    pub supersample: u32,
    #[serde(default)]
    pub texture_size: Option<usize>,
}

fn default_background() -> f32 {
    0.5
}

fn default_supersample() -> u32 {
    1
}

impl SceneFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn distance(&self) -> Result<f64> {
        let d = match (self.distance_m, self.distance_baselines, self.baseline_m) {
            (Some(d), None, _) => d,
            (None, Some(n), Some(b)) => n * b,
            (None, Some(_), None) => {
                return Err(Error::Config("`distance_baselines` needs `baseline_m`".into()))
            }
            (Some(_), Some(_), _) => {
                return Err(Error::Config(
                    "give either `distance_m` or `distance_baselines`, not both".into(),
                ))
            }
            (None, None, _) => {
                return Err(Error::Config(
                    "scene needs `distance_m` or `distance_baselines`".into(),
                ))
            }
        };
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Config(format!("target distance must be positive, got {d}")));
        }
        Ok(d)
    }

    pub fn texture_kind(&self) -> Result<TextureKind> {
        self.texture.parse().map_err(|e: texture::UnknownTexture| Error::Config(e.to_string()))
    }

    pub fn to_scene(&self) -> Result<Scene> {
        if self.supersample == 0 {
            return Err(Error::Config("`supersample` must be at least 1".into()));
        }
        let d = self.distance()?;
        let mut params = TextureParams::default();
        if let Some(size) = self.texture_size {
            params.size = size;
        }
        let tex = texture::generate(self.texture_kind()?, &params);
        let half = self.half_extent_m.unwrap_or(d);
        let target = PlanarTarget::fronto_parallel(d, half, tex)?;
        Ok(Scene::new(target, self.background))
    }
}
