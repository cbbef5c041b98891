//! Geometric depth and the three geometry-error modes.
//!
//! The projection ratio gives a depth estimate `Z_geo = f * H / h_bbox` from
//! the 3D dimension height and the 2D box height. Because the 2D box tracks
//! the object's visible surface rather than its center column, `Z_geo`
//! deviates from the true center depth `Z_gt` by a residual that can be
//! expressed in three exactly equivalent ways:
//!
//! - a depth error added to the estimate: `Z = Z_geo + Z_err`
//! - a dimension-height correction: `Z = f * (H + H_err) / h_bbox`
//! - a 2D-height correction in the denominator: `Z = f * H / (h_bbox - h_err)`
//!
//! The identities `H_err * f = Z_err * h_bbox` and
//! `f * H / (h_bbox - h_err) = Z_gt` tie the modes together; the functions
//! here compute each error and convert between modes, all in 64-bit
//! meters/pixels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeodepthError {
    #[error("degenerate pixel height h = {h}")]
    DegenerateHeight { h: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("mode {mode:?} requires field `{field}`")]
    MissingField {
        mode: DepthMode,
        field: &'static str,
    },
    #[error("corrected pixel height h_bbox - h_err = {denom} is not positive")]
    Singularity { denom: f64 },
    #[error("depth estimate list is empty")]
    EmptyEstimates,
}

/// Per-object derived quantities tying one consistent set of depth
/// attributes together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryRecord {
    /// Vertical focal length, pixels.
    pub focal: f64,
    /// 3D dimension height `H`, meters.
    pub dim_height: f64,
    /// 2D bounding-box height `h_bbox`, pixels.
    pub h_bbox: f64,
    /// Projected central height `h_c = f * H / Z_gt`, pixels.
    pub h_center: f64,
    /// Ground-truth center depth `Z_gt`, meters.
    pub depth_gt: f64,
    /// Geometric depth `Z_geo = f * H / h_bbox`, meters.
    pub depth_geo: f64,
    /// Depth error `Z_err = Z_gt - Z_geo`, meters.
    pub depth_err: f64,
    /// Dimension height error `H_err = Z_err * h_bbox / f`, meters.
    pub dim_height_err: f64,
    /// Bounding-box height error `h_err = h_bbox - f * H / Z_gt`, pixels.
    pub h_bbox_err: f64,
}

impl GeometryRecord {
    /// Derive the full record from the four independent quantities.
    pub fn derive(
        focal: f64,
        dim_height: f64,
        h_bbox: f64,
        depth_gt: f64,
    ) -> Result<Self, GeodepthError> {
        if !(depth_gt > 0.0) {
            return Err(GeodepthError::NonPositive {
                name: "depth_gt",
                value: depth_gt,
            });
        }
        let depth_geo = geometric_depth(focal, dim_height, h_bbox)?;
        let depth_err = depth_error(depth_gt, depth_geo);
        let dim_height_err = dim_height_error(depth_err, h_bbox, focal)?;
        let h_bbox_err = bbox_height_error(focal, dim_height, h_bbox, depth_gt)?;
        Ok(Self {
            focal,
            dim_height,
            h_bbox,
            h_center: focal * dim_height / depth_gt,
            depth_gt,
            depth_geo,
            depth_err,
            dim_height_err,
            h_bbox_err,
        })
    }

    /// Column names for the CSV export, frozen in field order.
    pub const CSV_HEADER: &'static str = "f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.focal,
            self.dim_height,
            self.h_bbox,
            self.h_center,
            self.depth_gt,
            self.depth_geo,
            self.depth_err,
            self.dim_height_err,
            self.h_bbox_err
        )
    }
}

/// `Z = f * H / h`. Used with `h = h_bbox` for the geometric depth and
/// `h = h_c` for the central depth.
pub fn geometric_depth(focal: f64, dim_height: f64, h: f64) -> Result<f64, GeodepthError> {
    if !(focal > 0.0) {
        return Err(GeodepthError::NonPositive {
            name: "focal",
            value: focal,
        });
    }
    if !(dim_height > 0.0) {
        return Err(GeodepthError::NonPositive {
            name: "dim_height",
            value: dim_height,
        });
    }
    if !(h > 0.0) {
        return Err(GeodepthError::DegenerateHeight { h });
    }
    Ok(focal * dim_height / h)
}

/// `Z_err = Z_gt - Z_geo`. The sign is preserved: convex shapes make it
/// nonnegative, noisy annotated heights may flip it.
pub fn depth_error(depth_gt: f64, depth_geo: f64) -> f64 {
    depth_gt - depth_geo
}

/// `H_err = Z_err * h_bbox / f`, the 3D-height correction that makes
/// `f * (H + H_err) / h_bbox = Z_gt` exact.
pub fn dim_height_error(depth_err: f64, h_bbox: f64, focal: f64) -> Result<f64, GeodepthError> {
    if !(focal > 0.0) {
        return Err(GeodepthError::NonPositive {
            name: "focal",
            value: focal,
        });
    }
    Ok(depth_err * h_bbox / focal)
}

/// `h_err = h_bbox - f * H / Z_gt`, the 2D-height correction that makes
/// `f * H / (h_bbox - h_err) = Z_gt` exact. May be negative.
pub fn bbox_height_error(
    focal: f64,
    dim_height: f64,
    h_bbox: f64,
    depth_gt: f64,
) -> Result<f64, GeodepthError> {
    if !(depth_gt > 0.0) {
        return Err(GeodepthError::NonPositive {
            name: "depth_gt",
            value: depth_gt,
        });
    }
    Ok(h_bbox - focal * dim_height / depth_gt)
}

/// How a final depth estimate is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthMode {
    /// Pass a provided depth estimate through unchanged.
    Direct,
    /// `f * H / h_bbox` — the uncorrected geometric depth.
    GeometricHbbox,
    /// `f * H / h_c` — geometric depth from the projected central height.
    GeometricHc,
    /// `Z_geo + Z_err`.
    GdPlusDepthErr,
    /// `f * (H + H_err) / h_bbox`.
    GdPlusDimHeightErr,
    /// `f * H / (h_bbox - h_err)`.
    GdMinusHbboxErr,
}

/// The fields a [`DepthMode`] may draw on; leave unused ones `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DepthInputs {
    pub focal: Option<f64>,
    pub dim_height: Option<f64>,
    pub h_bbox: Option<f64>,
    pub h_center: Option<f64>,
    pub direct: Option<f64>,
    pub depth_err: Option<f64>,
    pub dim_height_err: Option<f64>,
    pub h_bbox_err: Option<f64>,
}

impl DepthInputs {
    /// All fields of a consistent record, ready for any mode.
    pub fn from_record(r: &GeometryRecord) -> Self {
        Self {
            focal: Some(r.focal),
            dim_height: Some(r.dim_height),
            h_bbox: Some(r.h_bbox),
            h_center: Some(r.h_center),
            direct: Some(r.depth_gt),
            depth_err: Some(r.depth_err),
            dim_height_err: Some(r.dim_height_err),
            h_bbox_err: Some(r.h_bbox_err),
        }
    }
}

fn require(
    value: Option<f64>,
    mode: DepthMode,
    field: &'static str,
) -> Result<f64, GeodepthError> {
    value.ok_or(GeodepthError::MissingField { mode, field })
}

/// Assemble a depth estimate under the given mode from whichever fields it
/// needs; missing fields are reported by name.
pub fn depth_from_mode(mode: DepthMode, inputs: &DepthInputs) -> Result<f64, GeodepthError> {
    match mode {
        DepthMode::Direct => require(inputs.direct, mode, "direct"),
        DepthMode::GeometricHbbox => geometric_depth(
            require(inputs.focal, mode, "focal")?,
            require(inputs.dim_height, mode, "dim_height")?,
            require(inputs.h_bbox, mode, "h_bbox")?,
        ),
        DepthMode::GeometricHc => geometric_depth(
            require(inputs.focal, mode, "focal")?,
            require(inputs.dim_height, mode, "dim_height")?,
            require(inputs.h_center, mode, "h_center")?,
        ),
        DepthMode::GdPlusDepthErr => {
            let z_geo = geometric_depth(
                require(inputs.focal, mode, "focal")?,
                require(inputs.dim_height, mode, "dim_height")?,
                require(inputs.h_bbox, mode, "h_bbox")?,
            )?;
            Ok(z_geo + require(inputs.depth_err, mode, "depth_err")?)
        }
        DepthMode::GdPlusDimHeightErr => {
            let focal = require(inputs.focal, mode, "focal")?;
            let dim_height = require(inputs.dim_height, mode, "dim_height")?;
            let h_bbox = require(inputs.h_bbox, mode, "h_bbox")?;
            let h_err = require(inputs.dim_height_err, mode, "dim_height_err")?;
            if !(h_bbox > 0.0) {
                return Err(GeodepthError::DegenerateHeight { h: h_bbox });
            }
            if !(focal > 0.0) {
                return Err(GeodepthError::NonPositive {
                    name: "focal",
                    value: focal,
                });
            }
            Ok(focal * (dim_height + h_err) / h_bbox)
        }
        DepthMode::GdMinusHbboxErr => {
            let focal = require(inputs.focal, mode, "focal")?;
            let dim_height = require(inputs.dim_height, mode, "dim_height")?;
            let h_bbox = require(inputs.h_bbox, mode, "h_bbox")?;
            let h_err = require(inputs.h_bbox_err, mode, "h_bbox_err")?;
            let denom = h_bbox - h_err;
            if !(denom > 0.0) {
                return Err(GeodepthError::Singularity { denom });
            }
            geometric_depth(focal, dim_height, denom)
        }
    }
}

/// Inverse-uncertainty weighted mean of `(Z, sigma)` estimates:
/// `Z = sum(Z_i / sigma_i) / sum(1 / sigma_i)`. Weights are inverse Laplace
/// scales, matching the Laplacian uncertainty model of the depth loss.
pub fn weighted_depth_fusion(estimates: &[(f64, f64)]) -> Result<f64, GeodepthError> {
    if estimates.is_empty() {
        return Err(GeodepthError::EmptyEstimates);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(z, sigma) in estimates {
        if !(sigma > 0.0) {
            return Err(GeodepthError::NonPositive {
                name: "sigma",
                value: sigma,
            });
        }
        num += z / sigma;
        den += 1.0 / sigma;
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometric_depth_direct() {
        assert_eq!(geometric_depth(700.0, 1.5, 30.0).unwrap(), 35.0);
    }

    #[test]
    fn geometric_depth_inverse_identity() {
        for z in [5.0, 17.3, 80.0] {
            let h = 700.0 * 1.5 / z;
            assert!((geometric_depth(700.0, 1.5, h).unwrap() - z).abs() < 1e-12);
        }
    }

    #[test]
    fn geometric_depth_frozen_inverse_case() {
        // Inverse of h_c = 700 * 1.5 / 36.1 = 29.0859 (4 decimals).
        let z = geometric_depth(700.0, 1.5, 29.0859).unwrap();
        assert!((z - 36.100).abs() < 0.001, "z = {z}");
    }

    #[test]
    fn geometric_depth_errors() {
        assert_eq!(
            geometric_depth(700.0, 1.5, 0.0).unwrap_err(),
            GeodepthError::DegenerateHeight { h: 0.0 }
        );
        assert!(matches!(
            geometric_depth(-1.0, 1.5, 30.0).unwrap_err(),
            GeodepthError::NonPositive { name: "focal", .. }
        ));
        assert!(matches!(
            geometric_depth(700.0, 0.0, 30.0).unwrap_err(),
            GeodepthError::NonPositive {
                name: "dim_height",
                ..
            }
        ));
    }

    #[test]
    fn depth_error_subtraction() {
        assert!((depth_error(36.1, 35.0) - 1.1).abs() < 1e-12);
        assert_eq!(depth_error(42.0, 42.0), 0.0);
    }

    #[test]
    fn dim_height_error_direct() {
        let e = dim_height_error(1.1, 30.0, 700.0).unwrap();
        assert!((e - 33.0 / 700.0).abs() < 1e-15);
        assert_eq!(dim_height_error(0.0, 123.0, 700.0).unwrap(), 0.0);
    }

    #[test]
    fn bbox_height_error_frozen_case() {
        // 30 - 700 * 1.5 / 36.1 = 0.9141 (verified by the inverse identity
        // below).
        let e = bbox_height_error(700.0, 1.5, 30.0, 36.1).unwrap();
        assert!((e - 0.9141).abs() < 1e-4, "e = {e}");
        let back = geometric_depth(700.0, 1.5, 30.0 - e).unwrap();
        assert!((back - 36.1).abs() < 1e-9);
    }

    #[test]
    fn bbox_height_error_zero_when_consistent() {
        let z = geometric_depth(700.0, 1.5, 30.0).unwrap();
        assert!(bbox_height_error(700.0, 1.5, 30.0, z).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mode_identity_cases() {
        let r = GeometryRecord::derive(700.0, 1.5, 30.0, 36.1).unwrap();
        let inputs = DepthInputs::from_record(&r);
        let zerr0 = DepthInputs {
            depth_err: Some(0.0),
            ..inputs
        };
        let z = depth_from_mode(DepthMode::GdPlusDepthErr, &zerr0).unwrap();
        assert!((z - r.depth_geo).abs() < 1e-12);
    }

    #[test]
    fn mode_missing_field_named() {
        let inputs = DepthInputs {
            focal: Some(700.0),
            dim_height: Some(1.5),
            ..Default::default()
        };
        let err = depth_from_mode(DepthMode::GdPlusDepthErr, &inputs).unwrap_err();
        assert_eq!(
            err,
            GeodepthError::MissingField {
                mode: DepthMode::GdPlusDepthErr,
                field: "h_bbox"
            }
        );
    }

    #[test]
    fn mode_singularity_at_full_correction() {
        let r = GeometryRecord::derive(700.0, 1.5, 30.0, 36.1).unwrap();
        let inputs = DepthInputs {
            h_bbox_err: Some(r.h_bbox),
            ..DepthInputs::from_record(&r)
        };
        assert!(matches!(
            depth_from_mode(DepthMode::GdMinusHbboxErr, &inputs).unwrap_err(),
            GeodepthError::Singularity { .. }
        ));
    }

    #[test]
    fn fusion_cases() {
        assert_eq!(weighted_depth_fusion(&[(35.0, 2.0)]).unwrap(), 35.0);
        let mean = weighted_depth_fusion(&[(34.0, 1.5), (36.0, 1.5)]).unwrap();
        assert!((mean - 35.0).abs() < 1e-12);
        let fused = weighted_depth_fusion(&[(35.0, 1.0), (37.0, 2.0)]).unwrap();
        assert!((fused - 53.5 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn fusion_contract_errors() {
        assert_eq!(
            weighted_depth_fusion(&[]).unwrap_err(),
            GeodepthError::EmptyEstimates
        );
        assert!(matches!(
            weighted_depth_fusion(&[(35.0, 0.0)]).unwrap_err(),
            GeodepthError::NonPositive { name: "sigma", .. }
        ));
    }

    proptest! {
        #[test]
        fn cross_mode_consistency(
            focal in 300.0f64..1500.0,
            dim_height in 0.5f64..4.0,
            h_bbox in 5.0f64..300.0,
            depth_gt in 3.0f64..90.0,
        ) {
            let r = GeometryRecord::derive(focal, dim_height, h_bbox, depth_gt).unwrap();
            let inputs = DepthInputs::from_record(&r);
            for mode in [DepthMode::GdPlusDepthErr, DepthMode::GdPlusDimHeightErr, DepthMode::GdMinusHbboxErr] {
                let z = depth_from_mode(mode, &inputs).unwrap();
                prop_assert!((z - depth_gt).abs() < 1e-9, "{mode:?}: {z} vs {depth_gt}");
            }
            // H_err * f = Z_err * h_bbox, exactly up to rounding.
            prop_assert!((r.dim_height_err * r.focal - r.depth_err * r.h_bbox).abs() < 1e-9);
            // Eq. of the dimension correction: f * (H + H_err) / h_bbox = Z_gt.
            prop_assert!((r.focal * (r.dim_height + r.dim_height_err) / r.h_bbox - depth_gt).abs() < 1e-9);
        }

        #[test]
        fn geometric_depth_monotone_in_h(
            h1 in 5.0f64..200.0,
            delta in 0.1f64..50.0,
        ) {
            let lo = geometric_depth(700.0, 1.5, h1 + delta).unwrap();
            let hi = geometric_depth(700.0, 1.5, h1).unwrap();
            prop_assert!(lo < hi);
        }

        #[test]
        fn negative_depth_err_survives(
            focal in 300.0f64..1500.0,
            dim_height in 0.5f64..4.0,
            depth_gt in 3.0f64..90.0,
            inflate in 1.01f64..2.0,
        ) {
            // An over-large annotated h_bbox flips the error sign; the record
            // must still be internally consistent.
            let h_bbox = focal * dim_height / depth_gt * inflate;
            let r = GeometryRecord::derive(focal, dim_height, h_bbox, depth_gt).unwrap();
            prop_assert!(r.depth_err > 0.0);
            let h_small = focal * dim_height / depth_gt / inflate;
            let r2 = GeometryRecord::derive(focal, dim_height, h_small, depth_gt).unwrap();
            prop_assert!(r2.depth_err < 0.0);
            let inputs = DepthInputs::from_record(&r2);
            let z = depth_from_mode(DepthMode::GdPlusDepthErr, &inputs).unwrap();
            prop_assert!((z - depth_gt).abs() < 1e-9);
        }
    }
}
