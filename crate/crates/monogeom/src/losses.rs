//! Training-loss math as pure functions: region Dice loss over box masks,
//! the Laplacian uncertainty depth loss with its analytic gradients, and the
//! weighted overall loss over precomputed component scalars.
//!
//! The depth loss is `L = (sqrt(2) / sigma) * |Z_pred - Z_gt| + ln(sigma)`,
//! where the prediction is either `Z_geo + Z_err` or
//! `f * H / (h_bbox - h_err)` depending on the error mode. Its gradient with
//! respect to the 2D-height correction picks up the factor
//! `f * H / (h_bbox - h_err)^2`, which blows up as the correction approaches
//! the full box height; that pole is why the 2D-height mode trains worse
//! than the depth-error mode.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::BBox2D;

/// Smoothing added to the Dice denominator so empty masks stay finite.
pub const DICE_EPSILON: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("mask dimensions differ: {a_w}x{a_h} vs {b_w}x{b_h}")]
    DimensionMismatch {
        a_w: usize,
        a_h: usize,
        b_w: usize,
        b_h: usize,
    },
    #[error("mask value {value} at cell {index} is outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },
    #[error("sigma must be positive, got {sigma}")]
    NonPositiveSigma { sigma: f64 },
    #[error("depth residual is zero: the L1 loss is not differentiable there")]
    NonDifferentiableResidual,
    #[error("corrected pixel height h_bbox - h_err = {denom} is not positive")]
    SingularDenominator { denom: f64 },
    #[error("loss component `{name}` must be finite and nonnegative, got {value}")]
    BadComponent { name: &'static str, value: f64 },
    #[error("grid dimensions must be positive, got {w}x{h}")]
    EmptyGrid { w: usize, h: usize },
}

/// Dense per-cell probabilities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskGrid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl MaskGrid {
    pub fn zeros(width: usize, height: usize) -> Result<Self, LossError> {
        if width == 0 || height == 0 {
            return Err(LossError::EmptyGrid {
                w: width,
                h: height,
            });
        }
        Ok(Self {
            width,
            height,
            values: vec![0.0; width * height],
        })
    }

    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self, LossError> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(LossError::EmptyGrid {
                w: width,
                h: height,
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(LossError::ValueOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.values[row * self.width + col] = value.clamp(0.0, 1.0);
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Binary target-region mask on a strided grid: cell `(row, col)` is 1 iff
/// its center pixel `((col + 0.5) * stride, (row + 0.5) * stride)` falls
/// inside any box. An empty box list yields an all-zero mask.
pub fn region_mask(
    bboxes: &[BBox2D],
    grid_width: usize,
    grid_height: usize,
    stride: usize,
) -> Result<MaskGrid, LossError> {
    if stride == 0 {
        return Err(LossError::EmptyGrid { w: 0, h: 0 });
    }
    let mut mask = MaskGrid::zeros(grid_width, grid_height)?;
    for row in 0..grid_height {
        let cy = (row as f64 + 0.5) * stride as f64;
        for col in 0..grid_width {
            let cx = (col as f64 + 0.5) * stride as f64;
            let inside = bboxes
                .iter()
                .any(|b| cx >= b.left && cx <= b.right && cy >= b.top && cy <= b.bottom);
            if inside {
                mask.set(row, col, 1.0);
            }
        }
    }
    Ok(mask)
}

/// `1 - 2 * sum(p * g) / (sum(p) + sum(g) + eps)`.
pub fn dice_loss(p: &MaskGrid, g: &MaskGrid) -> Result<f64, LossError> {
    if p.width != g.width || p.height != g.height {
        return Err(LossError::DimensionMismatch {
            a_w: p.width,
            a_h: p.height,
            b_w: g.width,
            b_h: g.height,
        });
    }
    let overlap: f64 = p
        .values
        .iter()
        .zip(g.values.iter())
        .map(|(a, b)| a * b)
        .sum();
    Ok(1.0 - 2.0 * overlap / (p.sum() + g.sum() + DICE_EPSILON))
}

/// Sum of per-scale Dice losses, the `region_sum` component of the overall
/// loss.
pub fn region_loss_sum(scales: &[(&MaskGrid, &MaskGrid)]) -> Result<f64, LossError> {
    scales.iter().map(|(p, g)| dice_loss(p, g)).sum()
}

/// Laplacian uncertainty depth loss
/// `(sqrt(2) / sigma) * |Z_geo + Z_err - Z_gt| + ln(sigma)`.
pub fn laplacian_depth_loss(
    z_geo: f64,
    z_err: f64,
    z_gt: f64,
    sigma: f64,
) -> Result<f64, LossError> {
    if !(sigma > 0.0) {
        return Err(LossError::NonPositiveSigma { sigma });
    }
    let residual = z_geo + z_err - z_gt;
    Ok(std::f64::consts::SQRT_2 / sigma * residual.abs() + sigma.ln())
}

/// Which correction the depth loss differentiates through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ErrorParam {
    /// Additive depth error: `Z = f * H / h_bbox + Z_err`.
    DepthError(f64),
    /// Denominator correction: `Z = f * H / (h_bbox - h_err)`.
    BboxHeightError(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthLossInputs {
    pub focal: f64,
    pub dim_height: f64,
    pub h_bbox: f64,
    pub z_gt: f64,
    pub sigma: f64,
    pub param: ErrorParam,
}

/// Analytic partial derivatives of the depth loss at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthLossGradients {
    /// Loss value at the point.
    pub loss: f64,
    /// `dL/dZ = (sqrt(2) / sigma) * sign(residual)`.
    pub wrt_depth: f64,
    /// `dL/dZ_err` or `dL/dh_err`, depending on the mode; the latter is
    /// `dL/dZ * f * H / (h_bbox - h_err)^2`.
    pub wrt_param: f64,
    /// `dL/dsigma = -(sqrt(2) / sigma^2) * |residual| + 1 / sigma`.
    pub wrt_sigma: f64,
}

/// Evaluate the depth loss and its analytic partials. The L1 kink at zero
/// residual is an error, not a subgradient choice: callers perturb or skip.
pub fn depth_loss_gradients(inputs: &DepthLossInputs) -> Result<DepthLossGradients, LossError> {
    if !(inputs.sigma > 0.0) {
        return Err(LossError::NonPositiveSigma {
            sigma: inputs.sigma,
        });
    }
    let (z_pred, dz_dparam) = match inputs.param {
        ErrorParam::DepthError(z_err) => {
            (inputs.focal * inputs.dim_height / inputs.h_bbox + z_err, 1.0)
        }
        ErrorParam::BboxHeightError(h_err) => {
            let denom = inputs.h_bbox - h_err;
            if !(denom > 0.0) {
                return Err(LossError::SingularDenominator { denom });
            }
            (
                inputs.focal * inputs.dim_height / denom,
                inputs.focal * inputs.dim_height / (denom * denom),
            )
        }
    };
    let residual = z_pred - inputs.z_gt;
    if residual == 0.0 {
        return Err(LossError::NonDifferentiableResidual);
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let wrt_depth = sqrt2 / inputs.sigma * residual.signum();
    Ok(DepthLossGradients {
        loss: sqrt2 / inputs.sigma * residual.abs() + inputs.sigma.ln(),
        wrt_depth,
        wrt_param: wrt_depth * dz_dparam,
        wrt_sigma: -sqrt2 / (inputs.sigma * inputs.sigma) * residual.abs() + 1.0 / inputs.sigma,
    })
}

/// The nine loss weights, in listing order: cls, 2D size, center xy, GIoU,
/// 3D size, angle, depth, depth map, region sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda: [f64; 9],
}

impl Default for LossWeights {
    /// Weights used by the reference training recipe.
    fn default() -> Self {
        Self {
            lambda: [2.0, 5.0, 2.0, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        }
    }
}

/// Precomputed scalar loss components; the heads producing them live
/// outside this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossComponents {
    pub cls: f64,
    pub size_2d: f64,
    pub center_xy: f64,
    pub giou: f64,
    pub size_3d: f64,
    pub angle: f64,
    pub depth: f64,
    pub depth_map: f64,
    /// Sum of the per-scale region Dice losses.
    pub region_sum: f64,
}

impl LossComponents {
    fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("cls", self.cls),
            ("size_2d", self.size_2d),
            ("center_xy", self.center_xy),
            ("giou", self.giou),
            ("size_3d", self.size_3d),
            ("angle", self.angle),
            ("depth", self.depth),
            ("depth_map", self.depth_map),
            ("region_sum", self.region_sum),
        ]
    }
}

/// `sum_i lambda_i * component_i` over the nine components in listing
/// order.
pub fn overall_loss(components: &LossComponents, weights: &LossWeights) -> Result<f64, LossError> {
    let mut total = 0.0;
    for ((name, value), lambda) in components.named().into_iter().zip(weights.lambda) {
        if !value.is_finite() || value < 0.0 {
            return Err(LossError::BadComponent { name, value });
        }
        total += lambda * value;
    }
    Ok(total)
}
