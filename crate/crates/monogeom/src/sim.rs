//! Brute-force synthetic scene projector.
//!
//! Places a vehicle solid on a flat ground plane, projects every vertex
//! through the pinhole camera, and reads geometric depth off the resulting
//! 2D box exactly the way the closed forms claim to. Nothing here reuses a
//! closed-form shortcut, which is what makes the module usable as an
//! independent oracle: orientation and depth sweeps check perspective
//! invariance, the trapezoid profile reproduces the camera-height bias, and
//! fleet sampling feeds the distribution studies.
//!
//! The ground plane sits at camera-frame `y = camera_height` (level camera,
//! flat ground); vehicles stand with their bottom face on it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{project_point, rotate_y, BBox2D, Dimensions, Point3};
use crate::geodepth::{geometric_depth, GeometryRecord};
use crate::kitti::CameraIntrinsics;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid vehicle shape: {reason}")]
    InvalidShape { reason: String },
    #[error("vehicle vertex at or behind the camera plane (z = {z})")]
    BehindCamera { z: f64 },
    #[error("projected silhouette has degenerate height {h}")]
    DegenerateSilhouette { h: f64 },
    #[error("sweep needs at least {min} steps, got {steps}")]
    TooFewSteps { min: usize, steps: usize },
    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },
    #[error("fleet must have at least one sample")]
    EmptyFleet,
}

/// Vehicle solid profile. The trapezoid prism is a cuboid whose top-front
/// edge is chamfered by a hood wedge: the slope runs `hood_run` back from
/// the nose and `hood_drop` down from the roof.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VehicleProfile {
    Cuboid,
    TrapezoidPrism { hood_run: f64, hood_drop: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleShape {
    pub dims: Dimensions,
    pub profile: VehicleProfile,
}

impl VehicleShape {
    pub fn cuboid(dims: Dimensions) -> Self {
        Self {
            dims,
            profile: VehicleProfile::Cuboid,
        }
    }

    pub fn trapezoid(dims: Dimensions, hood_run: f64, hood_drop: f64) -> Self {
        Self {
            dims,
            profile: VehicleProfile::TrapezoidPrism {
                hood_run,
                hood_drop,
            },
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if !self.dims.is_positive() {
            return Err(SimError::InvalidShape {
                reason: format!("dims must be positive, got {:?}", self.dims),
            });
        }
        if let VehicleProfile::TrapezoidPrism {
            hood_run,
            hood_drop,
        } = self.profile
        {
            if !(hood_run > 0.0 && hood_run < self.dims.length) {
                return Err(SimError::InvalidShape {
                    reason: format!(
                        "hood_run must lie in (0, length = {}), got {hood_run}",
                        self.dims.length
                    ),
                });
            }
            if !(hood_drop > 0.0 && hood_drop < self.dims.height) {
                return Err(SimError::InvalidShape {
                    reason: format!(
                        "hood_drop must lie in (0, height = {}), got {hood_drop}",
                        self.dims.height
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Object-frame vertex set: bottom face at `y' = 0`, top at `y' = -height`,
/// nose at `x' = +length/2`. Cuboids have 8 vertices, trapezoid prisms 10
/// (the chamfer adds one profile point per side).
pub fn make_vehicle(shape: &VehicleShape) -> Result<Vec<Point3>, SimError> {
    shape.validate()?;
    let Dimensions {
        height,
        width,
        length,
    } = shape.dims;
    let half_l = length / 2.0;
    // Side profile as (x', y') pairs, extruded over z' = +/- width/2.
    let profile: Vec<(f64, f64)> = match shape.profile {
        VehicleProfile::Cuboid => vec![
            (half_l, 0.0),
            (half_l, -height),
            (-half_l, -height),
            (-half_l, 0.0),
        ],
        VehicleProfile::TrapezoidPrism {
            hood_run,
            hood_drop,
        } => vec![
            (half_l, 0.0),
            (half_l, -(height - hood_drop)),
            (half_l - hood_run, -height),
            (-half_l, -height),
            (-half_l, 0.0),
        ],
    };
    let mut vertices = Vec::with_capacity(profile.len() * 2);
    for &(x, y) in &profile {
        for &z in &[width / 2.0, -width / 2.0] {
            vertices.push(Point3::new(x, y, z));
        }
    }
    Ok(vertices)
}

/// One projected vehicle pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimObservation {
    pub bbox: BBox2D,
    pub h_bbox: f64,
    /// Center depth the vehicle was placed at.
    pub z_center: f64,
    /// `f_v * H / h_bbox` read off the projected box.
    pub z_geo: f64,
    /// `z_center - z_geo`.
    pub z_err: f64,
    /// Depth of the closest solid vertex.
    pub nearest_vertex_depth: f64,
}

/// A camera looking at vehicles on flat ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub intrinsics: CameraIntrinsics,
    /// Camera height above the ground plane, meters.
    pub camera_height: f64,
    pub vehicle: VehicleShape,
}

impl Scene {
    /// Place the vehicle (bottom-face center at `(lateral_x, ground,
    /// center_depth)`, yawed about y), project every vertex, and derive the
    /// geometric-depth quantities from the projected box.
    pub fn observe(
        &self,
        yaw: f64,
        center_depth: f64,
        lateral_x: f64,
    ) -> Result<SimObservation, SimError> {
        if !(self.camera_height > 0.0) {
            return Err(SimError::InvalidShape {
                reason: format!("camera_height must be positive, got {}", self.camera_height),
            });
        }
        let vertices = make_vehicle(&self.vehicle)?;
        let mut left = f64::INFINITY;
        let mut top = f64::INFINITY;
        let mut right = f64::NEG_INFINITY;
        let mut bottom = f64::NEG_INFINITY;
        let mut nearest = f64::INFINITY;
        for v in &vertices {
            let (rx, rz) = rotate_y(yaw, v.x, v.z);
            let p = Point3::new(
                lateral_x + rx,
                self.camera_height + v.y,
                center_depth + rz,
            );
            if p.z <= 0.0 {
                return Err(SimError::BehindCamera { z: p.z });
            }
            nearest = nearest.min(p.z);
            let (u, vv) =
                project_point(&self.intrinsics, p).map_err(|_| SimError::BehindCamera { z: p.z })?;
            left = left.min(u);
            right = right.max(u);
            top = top.min(vv);
            bottom = bottom.max(vv);
        }
        let bbox = BBox2D::new(left, top, right, bottom);
        let h_bbox = bbox.height();
        if !(h_bbox > 0.0) {
            return Err(SimError::DegenerateSilhouette { h: h_bbox });
        }
        let z_geo = geometric_depth(self.intrinsics.f_v, self.vehicle.dims.height, h_bbox)
            .map_err(|_| SimError::DegenerateSilhouette { h: h_bbox })?;
        Ok(SimObservation {
            bbox,
            h_bbox,
            z_center: center_depth,
            z_geo,
            z_err: center_depth - z_geo,
            nearest_vertex_depth: nearest,
        })
    }

    /// Observations over yaw in `[0, 2*pi]`, inclusive linear grid,
    /// `steps >= 4`.
    pub fn orientation_sweep(
        &self,
        center_depth: f64,
        lateral_x: f64,
        steps: usize,
    ) -> Result<Vec<(f64, SimObservation)>, SimError> {
        if steps < 4 {
            return Err(SimError::TooFewSteps { min: 4, steps });
        }
        let mut out = Vec::with_capacity(steps);
        for k in 0..steps {
            let yaw = std::f64::consts::TAU * k as f64 / (steps - 1) as f64;
            out.push((yaw, self.observe(yaw, center_depth, lateral_x)?));
        }
        Ok(out)
    }

    /// Observations over center depth on an inclusive linear grid;
    /// `steps == 1` observes the range start only.
    pub fn depth_sweep(
        &self,
        yaw: f64,
        lateral_x: f64,
        range: (f64, f64),
        steps: usize,
    ) -> Result<Vec<(f64, SimObservation)>, SimError> {
        if steps < 1 {
            return Err(SimError::TooFewSteps { min: 1, steps });
        }
        let (lo, hi) = range;
        let mut out = Vec::with_capacity(steps);
        for k in 0..steps {
            let z = if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (steps - 1) as f64
            };
            out.push((z, self.observe(yaw, z, lateral_x)?));
        }
        Ok(out)
    }
}

/// An explicitly parameterized sampling distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ParamDist {
    Constant(f64),
    Uniform { lo: f64, hi: f64 },
    /// Gaussian truncated from below: resampled up to a bounded number of
    /// times, then clamped to `min`.
    Normal { mean: f64, std: f64, min: f64 },
}

impl ParamDist {
    fn validate(&self, name: &str) -> Result<(), SimError> {
        let bad = |reason: String| Err(SimError::InvalidDistribution { reason });
        match *self {
            ParamDist::Constant(v) if !v.is_finite() => {
                bad(format!("{name}: constant must be finite, got {v}"))
            }
            ParamDist::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                bad(format!("{name}: uniform needs lo < hi, got [{lo}, {hi}]"))
            }
            ParamDist::Normal { mean, std, min }
                if !(mean.is_finite() && std > 0.0 && min.is_finite() && min < mean) =>
            {
                bad(format!(
                    "{name}: normal needs std > 0 and min < mean, got mean {mean}, std {std}, min {min}"
                ))
            }
            _ => Ok(()),
        }
    }

    fn sample(&self, rng: &mut impl RngCore) -> f64 {
        match *self {
            ParamDist::Constant(v) => v,
            ParamDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
            ParamDist::Normal { mean, std, min } => {
                for _ in 0..64 {
                    let x = mean + std * sample_standard_normal(rng);
                    if x >= min {
                        return x;
                    }
                }
                min
            }
        }
    }
}

fn sample_standard_normal(rng: &mut impl RngCore) -> f64 {
    // Box-Muller; u1 bounded away from zero to keep ln finite.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// How the camera height is chosen per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CameraPlacement {
    /// Fixed height in meters.
    Fixed(f64),
    /// Height locked to `ratio * sampled_object_height`.
    HeightRatio(f64),
}

/// Vehicle profile template for fleet sampling; the trapezoid fractions
/// scale with each sample's dims so the shape invariants always hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FleetProfile {
    Cuboid,
    TrapezoidPrism {
        hood_run_frac: f64,
        hood_drop_frac: f64,
    },
}

/// Fleet sampling configuration. Yaw is always uniform over `[0, 2*pi)`;
/// vehicles sit on the optical axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetConfig {
    pub n: usize,
    pub seed: u64,
    pub intrinsics: CameraIntrinsics,
    pub camera: CameraPlacement,
    pub profile: FleetProfile,
    pub dim_height: ParamDist,
    pub dim_width: ParamDist,
    pub dim_length: ParamDist,
    pub depth: ParamDist,
}

impl FleetConfig {
    /// Car-like defaults: KITTI-scale dims spreads, uniform depth over
    /// [8 m, 75 m], camera locked to the object height.
    pub fn car_like(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            intrinsics: CameraIntrinsics::simple(721.5377, 721.5377, 609.5593, 172.854),
            camera: CameraPlacement::HeightRatio(1.0),
            profile: FleetProfile::Cuboid,
            dim_height: ParamDist::Normal {
                mean: 1.53,
                std: 0.15,
                min: 0.8,
            },
            dim_width: ParamDist::Normal {
                mean: 1.63,
                std: 0.25,
                min: 0.8,
            },
            dim_length: ParamDist::Normal {
                mean: 3.88,
                std: 0.9,
                min: 1.5,
            },
            depth: ParamDist::Uniform { lo: 8.0, hi: 75.0 },
        }
    }
}

/// Sample `n` observed vehicles and derive a full [`GeometryRecord`] from
/// each. Deterministic for a given seed: sample `i` draws from its own
/// RNG stream `(seed, i)`, so results do not depend on evaluation order.
pub fn sample_fleet(cfg: &FleetConfig) -> Result<Vec<GeometryRecord>, SimError> {
    if cfg.n == 0 {
        return Err(SimError::EmptyFleet);
    }
    cfg.dim_height.validate("dim_height")?;
    cfg.dim_width.validate("dim_width")?;
    cfg.dim_length.validate("dim_length")?;
    cfg.depth.validate("depth")?;
    match cfg.camera {
        CameraPlacement::Fixed(h) if !(h > 0.0) => {
            return Err(SimError::InvalidDistribution {
                reason: format!("camera height must be positive, got {h}"),
            })
        }
        CameraPlacement::HeightRatio(r) if !(r > 0.0) => {
            return Err(SimError::InvalidDistribution {
                reason: format!("camera height ratio must be positive, got {r}"),
            })
        }
        _ => {}
    }
    if let FleetProfile::TrapezoidPrism {
        hood_run_frac,
        hood_drop_frac,
    } = cfg.profile
    {
        if !(hood_run_frac > 0.0 && hood_run_frac < 1.0)
            || !(hood_drop_frac > 0.0 && hood_drop_frac < 1.0)
        {
            return Err(SimError::InvalidDistribution {
                reason: format!(
                    "trapezoid fractions must lie in (0, 1), got run {hood_run_frac}, drop {hood_drop_frac}"
                ),
            });
        }
    }

    let mut out = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let height = cfg.dim_height.sample(&mut rng);
        let width = cfg.dim_width.sample(&mut rng);
        let length = cfg.dim_length.sample(&mut rng);
        let yaw = rng.gen_range(0.0..std::f64::consts::TAU);
        let depth = cfg.depth.sample(&mut rng);
        let dims = Dimensions::new(height, width, length);
        let vehicle = match cfg.profile {
            FleetProfile::Cuboid => VehicleShape::cuboid(dims),
            FleetProfile::TrapezoidPrism {
                hood_run_frac,
                hood_drop_frac,
            } => VehicleShape::trapezoid(dims, hood_run_frac * length, hood_drop_frac * height),
        };
        let camera_height = match cfg.camera {
            CameraPlacement::Fixed(h) => h,
            CameraPlacement::HeightRatio(r) => r * height,
        };
        let scene = Scene {
            intrinsics: cfg.intrinsics,
            camera_height,
            vehicle,
        };
        let obs = scene.observe(yaw, depth, 0.0)?;
        let record = GeometryRecord::derive(cfg.intrinsics.f_v, height, obs.h_bbox, depth)
            .map_err(|e| SimError::InvalidDistribution {
                reason: format!("sample {i} produced a degenerate record: {e}"),
            })?;
        out.push(record);
    }
    Ok(out)
}
