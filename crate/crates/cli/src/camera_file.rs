//! Camera-parameter JSON files.
//!
//! ```json
//! {"model": "kannala_brandt", "width": 1076, "height": 1076,
//!  "fx": 342.234, "fy": 342.234, "cx": 538, "cy": 538, "fov_deg": 180,
//!  "params": {"k2": 7.58e-4, "k3": -3.26e-4, "k4": 4.03e-5, "k5": -1.86e-6}}
//! ```
//!
//! Parameter keys per model (absent keys default as noted):
//!
//! | model            | keys                                      |
//! |------------------|-------------------------------------------|
//! | `pinhole`        | none                                      |
//! | `atan`           | none                                      |
//! | `kannala_brandt` | `k1` (1.0), `k2`..`k5` (0)                |
//! | `mei`            | `xi` (required), `k1`, `k2`, `p1`, `p2` (0) |
//! | `scaramuzza`     | `a0` (required), `a1`..`a4` (0)           |
//!
//! Scaramuzza folds the pixel scale into its polynomial, so its `fx` and `fy`
//! must be 1. Unknown keys anywhere are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use vpcstereo_core::camera::{
    AtanModel, CameraModel, KannalaBrandtModel, MeiModel, PinholeIntrinsics, PinholeModel,
    ScaramuzzaModel,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub model: String,
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Full field of view in degrees. Required for every model but
    /// `pinhole`, where it defaults to 180.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fov_deg: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

pub const MODEL_TAGS: [&str; 5] = ["pinhole", "atan", "kannala_brandt", "mei", "scaramuzza"];

struct Params<'a> {
    map: &'a BTreeMap<String, f64>,
    model: &'a str,
}

impl Params<'_> {
    fn check_keys(&self, allowed: &[&str]) -> std::result::Result<(), String> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(format!(
                    "unknown parameter `{key}` for model `{}` (allowed: {})",
                    self.model,
                    if allowed.is_empty() {
                        "none".to_string()
                    } else {
                        allowed.join(", ")
                    }
                ));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    fn required(&self, key: &str) -> std::result::Result<f64, String> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| format!("model `{}` requires parameter `{key}`", self.model))
    }
}

impl CameraFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Loads and validates in one step.
    pub fn load_model(path: impl AsRef<Path>) -> Result<CameraModel> {
        let path = path.as_ref();
        Self::load(path)?
            .to_model()
            .map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    fn fov(&self) -> std::result::Result<f64, String> {
        match (self.fov_deg, self.model.as_str()) {
            (Some(f), _) => Ok(f.to_radians()),
            (None, "pinhole") => Ok(std::f64::consts::PI),
            (None, m) => Err(format!("model `{m}` requires `fov_deg`")),
        }
    }

    /// Builds and validates the model.
    pub fn to_model(&self) -> Result<CameraModel> {
        let numbers = [self.fx, self.fy, self.cx, self.cy]
            .into_iter()
            .chain(self.fov_deg)
            .chain(self.params.values().copied());
        if numbers.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("camera file contains a non-finite number".into()));
        }
        if !MODEL_TAGS.contains(&self.model.as_str()) {
            return Err(Error::Config(format!(
                "unknown model `{}` (expected one of {})",
                self.model,
                MODEL_TAGS.join(", ")
            )));
        }
        let p = Params {
            map: &self.params,
            model: &self.model,
        };
        let fov = self.fov().map_err(Error::Config)?;
        let model: CameraModel = match self.model.as_str() {
            "scaramuzza" => {
                p.check_keys(&["a0", "a1", "a2", "a3", "a4"]).map_err(Error::Config)?;
                if self.fx != 1.0 || self.fy != 1.0 {
                    return Err(Error::Config(
                        "scaramuzza folds the pixel scale into its polynomial; fx and fy must be 1".into(),
                    ));
                }
                let a0 = p.required("a0").map_err(Error::Config)?;
                let a = [a0, p.get("a1", 0.0), p.get("a2", 0.0), p.get("a3", 0.0), p.get("a4", 0.0)];
                ScaramuzzaModel::new(a, fov, self.cx, self.cy, self.width, self.height)?.into()
            }
            tag => {
                let k = PinholeIntrinsics::new(
                    self.fx,
                    self.fy,
                    self.cx,
                    self.cy,
                    self.width,
                    self.height,
                )?;
                match tag {
                    "pinhole" => {
                        p.check_keys(&[]).map_err(Error::Config)?;
                        PinholeModel::with_fov(k, fov)?.into()
                    }
                    "atan" => {
                        p.check_keys(&[]).map_err(Error::Config)?;
                        AtanModel::new(fov, k)?.into()
                    }
                    "kannala_brandt" => {
                        p.check_keys(&["k1", "k2", "k3", "k4", "k5"]).map_err(Error::Config)?;
                        let coeffs = [
                            p.get("k1", 1.0),
                            p.get("k2", 0.0),
                            p.get("k3", 0.0),
                            p.get("k4", 0.0),
                            p.get("k5", 0.0),
                        ];
                        KannalaBrandtModel::new(coeffs, fov, k)?.into()
                    }
                    _ => {
                        p.check_keys(&["xi", "k1", "k2", "p1", "p2"]).map_err(Error::Config)?;
                        let xi = p.required("xi").map_err(Error::Config)?;
                        MeiModel::new(
                            xi,
                            [p.get("k1", 0.0), p.get("k2", 0.0)],
                            [p.get("p1", 0.0), p.get("p2", 0.0)],
                            fov,
                            k,
                        )?
                        .into()
                    }
                }
            }
        };
        Ok(model)
    }
}
