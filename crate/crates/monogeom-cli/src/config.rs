//! TOML configuration: bias-scenario defaults and fleet distributions.
//!
//! The schema ships in `configs/default.toml`, which is also compiled in as
//! the fallback when no `--config` is given.

use serde::Deserialize;

use monogeom::bias::BiasScenario;
use monogeom::kitti::CameraIntrinsics;
use monogeom::sim::{CameraPlacement, FleetConfig, FleetProfile, ParamDist};

pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub bias: BiasSection,
    pub fleet: FleetSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSection {
    pub cam_height: f64,
    pub obj_height: f64,
    pub wheel_depth: f64,
    pub hood_run: f64,
    pub body_run_front: f64,
    pub body_run_rear: f64,
}

impl BiasSection {
    pub fn scenario(&self) -> BiasScenario {
        BiasScenario {
            cam_height: self.cam_height,
            obj_height: self.obj_height,
            wheel_depth: self.wheel_depth,
            hood_run: self.hood_run,
            body_run_front: self.body_run_front,
            body_run_rear: self.body_run_rear,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum DistSpec {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64, min: f64 },
}

impl DistSpec {
    fn dist(&self) -> ParamDist {
        match *self {
            DistSpec::Constant(v) => ParamDist::Constant(v),
            DistSpec::Uniform { lo, hi } => ParamDist::Uniform { lo, hi },
            DistSpec::Normal { mean, std, min } => ParamDist::Normal { mean, std, min },
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CameraSpec {
    Ratio { ratio: f64 },
    Fixed { fixed: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(String),
    Trapezoid {
        hood_run_frac: f64,
        hood_drop_frac: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSection {
    pub n: usize,
    pub seed: u64,
    pub focal: f64,
    pub principal_u: f64,
    pub principal_v: f64,
    pub camera: CameraSpec,
    pub profile: ProfileSpec,
    pub height: DistSpec,
    pub width: DistSpec,
    pub length: DistSpec,
    pub depth: DistSpec,
}

impl FleetSection {
    pub fn fleet_config(&self, n: Option<usize>, seed: Option<u64>) -> Result<FleetConfig, String> {
        let profile = match &self.profile {
            ProfileSpec::Named(name) if name == "cuboid" => FleetProfile::Cuboid,
            ProfileSpec::Named(name) => {
                return Err(format!(
                    "unknown fleet profile `{name}` (expected \"cuboid\" or a trapezoid table)"
                ))
            }
            ProfileSpec::Trapezoid {
                hood_run_frac,
                hood_drop_frac,
            } => FleetProfile::TrapezoidPrism {
                hood_run_frac: *hood_run_frac,
                hood_drop_frac: *hood_drop_frac,
            },
        };
        Ok(FleetConfig {
            n: n.unwrap_or(self.n),
            seed: seed.unwrap_or(self.seed),
            intrinsics: CameraIntrinsics::simple(
                self.focal,
                self.focal,
                self.principal_u,
                self.principal_v,
            ),
            camera: match self.camera {
                CameraSpec::Ratio { ratio } => CameraPlacement::HeightRatio(ratio),
                CameraSpec::Fixed { fixed } => CameraPlacement::Fixed(fixed),
            },
            profile,
            dim_height: self.height.dist(),
            dim_width: self.width.dist(),
            dim_length: self.length.dist(),
            depth: self.depth.dist(),
        })
    }
}

/// Load a config file, or the compiled-in defaults when `path` is `None`.
pub fn load(path: Option<&std::path::Path>) -> Result<Config, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| format!("cannot read config {}: {e}", p.display()))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    toml::from_str(&text).map_err(|e| format!("invalid config: {e}"))
}
