//! Closed-form camera-height bias for a trapezoidal side-profile vehicle.
//!
//! The geometric depth of a vehicle is read off its projected silhouette,
//! whose lowest point is the closest wheel at depth `Z_w`. When the camera
//! height differs from the object height (`gamma = H_cam / H != 1`) the top
//! of the silhouette shifts from the roof's leading edge toward its trailing
//! edge, displacing the surface depth implied by the box height away from
//! `Z_w` by a bias `l_bias`:
//!
//! - low regime (`gamma < 1`):
//!   `l_bias = (1 - gamma) * Z_w * l_a / (Z_w + gamma * l_a)` and
//!   `Z_geo = Z_w + l_bias`; the depth error keeps the form
//!   `Z_err = l_b1 + sigma1 * l_a` with
//!   `sigma1 = gamma / (1 - (1 - gamma) * l_a / (Z_w + l_a))`.
//! - high regime (`gamma > 1`), with `L = l_a + l_b1 + l_b2`:
//!   `l_bias = (gamma - 1) * Z_w * L / (Z_w + gamma * L)`,
//!   `Z_geo = Z_w - l_bias`, and `Z_err = l_b1 + l_a + sigma2 * L` with
//!   `sigma2 = (gamma - 1) / (1 + gamma * L / Z_w)`.
//!
//! Bounds: `gamma < sigma1 < 1` and `l_bias < (1 - gamma) * l_a` in the low
//! regime; `0 < sigma2 < gamma - 1` and `l_bias < (gamma - 1) * L` in the
//! high regime. At `gamma = 1` both forms vanish and `Z_err = l_b1 + l_a`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BiasError {
    #[error("scenario field `{name}` is invalid: {value}")]
    InvalidField { name: &'static str, value: f64 },
    #[error("sweep needs at least 2 steps, got {steps}")]
    TooFewSteps { steps: usize },
    #[error("sweep range [{lo}, {hi}] is invalid for `{name}`")]
    InvalidRange { name: &'static str, lo: f64, hi: f64 },
}

/// Side-view scenario: camera and object heights, closest-wheel depth, and
/// the three longitudinal runs of the trapezoid profile (hood slope `l_a`,
/// roof front to mid-length `l_b1`, mid-length to rear `l_b2`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasScenario {
    pub cam_height: f64,
    pub obj_height: f64,
    pub wheel_depth: f64,
    pub hood_run: f64,
    pub body_run_front: f64,
    pub body_run_rear: f64,
}

impl BiasScenario {
    /// Camera-to-object height ratio.
    pub fn gamma(&self) -> f64 {
        self.cam_height / self.obj_height
    }

    /// Total profile length `L = l_a + l_b1 + l_b2`.
    pub fn total_length(&self) -> f64 {
        self.hood_run + self.body_run_front + self.body_run_rear
    }

    fn validate(&self) -> Result<(), BiasError> {
        let positive = [
            ("cam_height", self.cam_height),
            ("obj_height", self.obj_height),
            ("wheel_depth", self.wheel_depth),
            ("hood_run", self.hood_run),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(BiasError::InvalidField { name, value });
            }
        }
        let nonnegative = [
            ("body_run_front", self.body_run_front),
            ("body_run_rear", self.body_run_rear),
        ];
        for (name, value) in nonnegative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(BiasError::InvalidField { name, value });
            }
        }
        Ok(())
    }
}

/// Which side of the height ratio the scenario sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Camera below the object (`gamma < 1`).
    Low,
    /// Camera above the object (`gamma > 1`).
    High,
    /// Heights match exactly.
    Unity,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Low => "low",
            Regime::High => "high",
            Regime::Unity => "unity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasResult {
    pub regime: Regime,
    /// Gap between the wheel depth and the silhouette surface depth, meters.
    pub l_bias: f64,
    /// Attenuation factor: `sigma1` in the low regime, `sigma2` in the high
    /// regime, `1` at unity (the low-regime limit).
    pub sigma: f64,
    /// Surface depth implied by the projected box: `Z_w +/- l_bias`.
    pub z_geo: f64,
    /// Center depth minus `z_geo`.
    pub z_err: f64,
}

/// Internal similar-triangle quantities, exposed for debugging only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasTrace {
    /// Profile height at the wheel's depth plane (`H_w`), meters.
    pub wheel_height: f64,
    /// Sight-line slope angle to the silhouette top, radians.
    pub slope_angle: f64,
}

/// Evaluate the closed forms for one scenario.
pub fn analyze_bias(s: &BiasScenario) -> Result<BiasResult, BiasError> {
    analyze_bias_traced(s).map(|(r, _)| r)
}

/// As [`analyze_bias`], also returning the internal derivation quantities.
pub fn analyze_bias_traced(s: &BiasScenario) -> Result<(BiasResult, BiasTrace), BiasError> {
    s.validate()?;
    let gamma = s.gamma();
    let z_w = s.wheel_depth;
    let l_a = s.hood_run;
    let total = s.total_length();
    let (h, h_cam) = (s.obj_height, s.cam_height);

    if gamma < 1.0 {
        // Sight line grazes the roof's leading edge, run l_a behind the wheel.
        let tan_angle = (h - h_cam) / (z_w + l_a);
        let wheel_height = h - (h - h_cam) * l_a / (z_w + l_a);
        let l_bias = (1.0 - gamma) * z_w * l_a / (z_w + gamma * l_a);
        let sigma = gamma / (1.0 - (1.0 - gamma) * l_a / (z_w + l_a));
        let result = BiasResult {
            regime: Regime::Low,
            l_bias,
            sigma,
            z_geo: z_w + l_bias,
            z_err: s.body_run_front + sigma * l_a,
        };
        Ok((
            result,
            BiasTrace {
                wheel_height,
                slope_angle: tan_angle.atan(),
            },
        ))
    } else if gamma > 1.0 {
        // Sight line grazes the roof's trailing edge, a full length L back.
        let tan_angle = (h_cam - h) / (z_w + total);
        let wheel_height = (h * z_w + h_cam * total) / (z_w + total);
        let l_bias = (gamma - 1.0) * z_w * total / (z_w + gamma * total);
        let sigma = (gamma - 1.0) / (1.0 + gamma * total / z_w);
        let result = BiasResult {
            regime: Regime::High,
            l_bias,
            sigma,
            z_geo: z_w - l_bias,
            z_err: s.body_run_front + l_a + sigma * total,
        };
        Ok((
            result,
            BiasTrace {
                wheel_height,
                slope_angle: tan_angle.atan(),
            },
        ))
    } else {
        let result = BiasResult {
            regime: Regime::Unity,
            l_bias: 0.0,
            sigma: 1.0,
            z_geo: z_w,
            z_err: s.body_run_front + l_a,
        };
        Ok((
            result,
            BiasTrace {
                wheel_height: h,
                slope_angle: 0.0,
            },
        ))
    }
}

/// Quantity varied by [`bias_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    WheelDepth,
    Gamma,
}

/// Evaluate the scenario over a linear grid of the varied quantity,
/// inclusive of both endpoints. A gamma range that crosses 1 gets an extra
/// sample exactly at the regime boundary rather than stepping over it.
pub fn bias_sweep(
    base: &BiasScenario,
    vary: SweepVariable,
    range: (f64, f64),
    steps: usize,
) -> Result<Vec<(f64, BiasResult)>, BiasError> {
    base.validate()?;
    if steps < 2 {
        return Err(BiasError::TooFewSteps { steps });
    }
    let (lo, hi) = range;
    let name = match vary {
        SweepVariable::WheelDepth => "wheel_depth",
        SweepVariable::Gamma => "gamma",
    };
    if !(lo > 0.0) || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(BiasError::InvalidRange { name, lo, hi });
    }
    let mut grid: Vec<f64> = (0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect();
    if vary == SweepVariable::Gamma && lo < 1.0 && hi > 1.0 && !grid.contains(&1.0) {
        grid.push(1.0);
        grid.sort_by(f64::total_cmp);
    }
    let mut out = Vec::with_capacity(grid.len());
    for value in grid {
        let scenario = match vary {
            SweepVariable::WheelDepth => BiasScenario {
                wheel_depth: value,
                ..*base
            },
            SweepVariable::Gamma => BiasScenario {
                cam_height: value * base.obj_height,
                ..*base
            },
        };
        out.push((value, analyze_bias(&scenario)?));
    }
    Ok(out)
}
