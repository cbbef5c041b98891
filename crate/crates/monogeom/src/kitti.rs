//! Parsing and serialization of KITTI calibration, label, and prediction
//! text formats, plus dataset loading.
//!
//! All formats are whitespace-separated ASCII and bit-compatible with the
//! public benchmark tooling: calibration files carry keyed rows of 12 reals
//! (`P0:` .. `P3:`, row-major 3x4), label files 15 fields per object, and
//! prediction files a 16th trailing score. Parsing is locale-independent
//! (the decimal separator is always `.`) and accepts scientific notation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::BBox2D;

/// Pinhole parameters extracted from the `P2:` row of a KITTI calibration
/// record. `tx` is the full fourth column of the projection matrix (KITTI
/// folds the stereo baseline into it); height relations only ever see the
/// vertical focal length `f_v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub f_u: f64,
    pub f_v: f64,
    pub c_u: f64,
    pub c_v: f64,
    /// Fourth-column translation terms `(P[0][3], P[1][3], P[2][3])`.
    pub tx: [f64; 3],
    /// Optional `(width, height)` in pixels. KITTI calibration files do not
    /// carry image dimensions; clipping operations require them explicitly.
    pub image_size: Option<(f64, f64)>,
}

impl CameraIntrinsics {
    /// Intrinsics with a zero fourth column and no image dimensions.
    pub fn simple(f_u: f64, f_v: f64, c_u: f64, c_v: f64) -> Self {
        Self {
            f_u,
            f_v,
            c_u,
            c_v,
            tx: [0.0; 3],
            image_size: None,
        }
    }

    pub fn with_image_size(mut self, width: f64, height: f64) -> Self {
        self.image_size = Some((width, height));
        self
    }

    fn validate(&self) -> Result<(), ParseError> {
        let bad = |reason: String| Err(ParseError::InvalidIntrinsics { reason });
        if !(self.f_u > 0.0) {
            return bad(format!("f_u must be positive, got {}", self.f_u));
        }
        if !(self.f_v > 0.0) {
            return bad(format!("f_v must be positive, got {}", self.f_v));
        }
        if !self.c_u.is_finite() || !self.c_v.is_finite() {
            return bad(format!(
                "principal point must be finite, got ({}, {})",
                self.c_u, self.c_v
            ));
        }
        if let Some((w, h)) = self.image_size {
            if !(w > 0.0 && h > 0.0) {
                return bad(format!("image dimensions must be positive, got {w}x{h}"));
            }
        }
        Ok(())
    }
}

/// One KITTI ground-truth or prediction object. Fields mirror the file
/// format; `DontCare` rows keep their sentinel dims/location verbatim and
/// must never reach geometry operations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectLabel {
    pub class_name: String,
    /// Fraction of the object outside image bounds, in `[0, 1]` for valid
    /// objects (`-1` sentinel on `DontCare` rows).
    pub truncation: f64,
    /// Occlusion state `0..=3` for valid objects (`-1` sentinel).
    pub occlusion: i32,
    /// Observation angle, radians.
    pub alpha: f64,
    pub bbox: BBox2D,
    /// `(height, width, length)` in meters.
    pub dims: crate::camera::Dimensions,
    /// Bottom-face center in the camera frame, meters.
    pub location: crate::camera::Point3,
    pub rotation_y: f64,
    /// Detection confidence; present on prediction rows only.
    pub score: Option<f64>,
}

impl ObjectLabel {
    pub fn is_dont_care(&self) -> bool {
        self.class_name == "DontCare"
    }

    /// Pixel height of the annotated 2D box.
    pub fn bbox_height(&self) -> f64 {
        self.bbox.height()
    }

    pub fn box3d(&self) -> crate::camera::Box3D {
        crate::camera::Box3D::new(self.dims, self.location, self.rotation_y)
    }
}

/// One loaded frame: id, camera, objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub id: String,
    pub intrinsics: CameraIntrinsics,
    pub labels: Vec<ObjectLabel>,
}

/// A split of frames in input-id order; ids are unique and every frame has
/// intrinsics by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub frames: Vec<Frame>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("calibration is missing required key `{key}`")]
    MissingKey { key: String },
    #[error("`{key}` expects {expected} values, found {found}")]
    ElementCount {
        key: String,
        expected: usize,
        found: usize,
    },
    #[error("unparsable number `{token}` at position {index} of `{key}`")]
    BadCalibToken {
        key: String,
        index: usize,
        token: String,
    },
    #[error("label line has {found} fields, expected 15 or 16")]
    FieldCount { found: usize },
    #[error("unparsable value `{token}` in label field {index} ({name})")]
    BadLabelField {
        index: usize,
        name: &'static str,
        token: String,
    },
    #[error("cannot serialize a prediction without a score")]
    MissingScore,
    #[error("invalid intrinsics: {reason}")]
    InvalidIntrinsics { reason: String },
}

/// A single problem encountered while loading a split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadIssue {
    pub id: String,
    pub path: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for LoadIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "{} ({}:{}): {}", self.id, self.path.display(), n, self.message),
            None => write!(f, "{} ({}): {}", self.id, self.path.display(), self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("ids list is empty")]
    EmptyIds,
    #[error("{} issue(s) while loading split:\n{}", .0.len(), format_issues(.0))]
    Issues(Vec<LoadIssue>),
}

fn format_issues(issues: &[LoadIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Extract camera-2 intrinsics from calibration-file contents: the `P2:`
/// row supplies `f_u = P[0][0]`, `f_v = P[1][1]`, `c_u = P[0][2]`,
/// `c_v = P[1][2]`, and the fourth column.
pub fn parse_calibration(text: &str) -> Result<CameraIntrinsics, ParseError> {
    let values = parse_calibration_row(text, "P2")?;
    let intr = CameraIntrinsics {
        f_u: values[0],
        f_v: values[5],
        c_u: values[2],
        c_v: values[6],
        tx: [values[3], values[7], values[11]],
        image_size: None,
    };
    intr.validate()?;
    Ok(intr)
}

/// Parse one keyed calibration row (e.g. `P2`) into its 12 reals.
pub fn parse_calibration_row(text: &str, key: &str) -> Result<[f64; 12], ParseError> {
    let prefix = format!("{key}:");
    for line in text.lines() {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix(&prefix) {
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            if tokens.len() != 12 {
                return Err(ParseError::ElementCount {
                    key: key.to_string(),
                    expected: 12,
                    found: tokens.len(),
                });
            }
            let mut out = [0.0; 12];
            for (i, tok) in tokens.iter().enumerate() {
                out[i] = tok.parse::<f64>().map_err(|_| ParseError::BadCalibToken {
                    key: key.to_string(),
                    index: i,
                    token: tok.to_string(),
                })?;
            }
            return Ok(out);
        }
    }
    Err(ParseError::MissingKey {
        key: key.to_string(),
    })
}

/// Emit a calibration record holding the canonical `P2:` row for these
/// intrinsics (zero skew, 12-digit scientific notation).
pub fn serialize_calibration(intr: &CameraIntrinsics) -> String {
    let p2 = [
        intr.f_u, 0.0, intr.c_u, intr.tx[0],
        0.0, intr.f_v, intr.c_v, intr.tx[1],
        0.0, 0.0, 1.0, intr.tx[2],
    ];
    let body = p2
        .iter()
        .map(|v| format!("{v:.12e}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!("P2: {body}\n")
}

const LABEL_FIELD_NAMES: [&str; 16] = [
    "type",
    "truncated",
    "occluded",
    "alpha",
    "bbox_left",
    "bbox_top",
    "bbox_right",
    "bbox_bottom",
    "height",
    "width",
    "length",
    "x",
    "y",
    "z",
    "rotation_y",
    "score",
];

fn parse_numeric(tokens: &[&str], index: usize) -> Result<f64, ParseError> {
    tokens[index]
        .parse::<f64>()
        .map_err(|_| ParseError::BadLabelField {
            index,
            name: LABEL_FIELD_NAMES[index],
            token: tokens[index].to_string(),
        })
}

/// Parse one label line: 15 whitespace-separated fields for ground truth,
/// 16 for a prediction with trailing score.
pub fn parse_label_line(line: &str) -> Result<ObjectLabel, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 15 && tokens.len() != 16 {
        return Err(ParseError::FieldCount {
            found: tokens.len(),
        });
    }
    let occ_raw = parse_numeric(&tokens, 2)?;
    if (occ_raw - occ_raw.round()).abs() > 1e-9 {
        return Err(ParseError::BadLabelField {
            index: 2,
            name: LABEL_FIELD_NAMES[2],
            token: tokens[2].to_string(),
        });
    }
    let score = if tokens.len() == 16 {
        Some(parse_numeric(&tokens, 15)?)
    } else {
        None
    };
    Ok(ObjectLabel {
        class_name: tokens[0].to_string(),
        truncation: parse_numeric(&tokens, 1)?,
        occlusion: occ_raw.round() as i32,
        alpha: parse_numeric(&tokens, 3)?,
        bbox: BBox2D::new(
            parse_numeric(&tokens, 4)?,
            parse_numeric(&tokens, 5)?,
            parse_numeric(&tokens, 6)?,
            parse_numeric(&tokens, 7)?,
        ),
        dims: crate::camera::Dimensions::new(
            parse_numeric(&tokens, 8)?,
            parse_numeric(&tokens, 9)?,
            parse_numeric(&tokens, 10)?,
        ),
        location: crate::camera::Point3::new(
            parse_numeric(&tokens, 11)?,
            parse_numeric(&tokens, 12)?,
            parse_numeric(&tokens, 13)?,
        ),
        rotation_y: parse_numeric(&tokens, 14)?,
        score,
    })
}

/// Parse a whole label file; the error carries the 1-based line number.
pub fn parse_label_file(text: &str) -> Result<Vec<ObjectLabel>, (usize, ParseError)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_label_line(line).map_err(|e| (i + 1, e))?);
    }
    Ok(out)
}

fn format_label_fields(label: &ObjectLabel) -> Vec<String> {
    vec![
        label.class_name.clone(),
        format!("{:.6}", label.truncation),
        format!("{}", label.occlusion),
        format!("{:.6}", label.alpha),
        format!("{:.6}", label.bbox.left),
        format!("{:.6}", label.bbox.top),
        format!("{:.6}", label.bbox.right),
        format!("{:.6}", label.bbox.bottom),
        format!("{:.6}", label.dims.height),
        format!("{:.6}", label.dims.width),
        format!("{:.6}", label.dims.length),
        format!("{:.6}", label.location.x),
        format!("{:.6}", label.location.y),
        format!("{:.6}", label.location.z),
        format!("{:.6}", label.rotation_y),
    ]
}

/// Serialize a ground-truth row (15 fields) or, when a score is present,
/// a prediction row (16 fields). Floats use fixed 6-decimal precision.
pub fn serialize_label(label: &ObjectLabel) -> String {
    let mut fields = format_label_fields(label);
    if let Some(score) = label.score {
        fields.push(format!("{score:.6}"));
    }
    fields.join(" ")
}

/// Serialize a prediction row; the score is mandatory.
pub fn serialize_prediction(label: &ObjectLabel) -> Result<String, ParseError> {
    if label.score.is_none() {
        return Err(ParseError::MissingScore);
    }
    Ok(serialize_label(label))
}

/// Load frames `{label_dir}/{id}.txt` + `{calib_dir}/{id}.txt` for each id,
/// in id order. Problems (missing files, parse failures) are aggregated into
/// one report naming every affected id; nothing is skipped silently.
pub fn load_split(
    label_dir: &Path,
    calib_dir: &Path,
    ids: &[String],
) -> Result<Dataset, LoadError> {
    if ids.is_empty() {
        return Err(LoadError::EmptyIds);
    }
    let mut frames = Vec::with_capacity(ids.len());
    let mut issues = Vec::new();
    for id in ids {
        let calib_path = calib_dir.join(format!("{id}.txt"));
        let label_path = label_dir.join(format!("{id}.txt"));
        let intrinsics = match fs::read_to_string(&calib_path) {
            Ok(text) => match parse_calibration(&text) {
                Ok(intr) => Some(intr),
                Err(e) => {
                    issues.push(LoadIssue {
                        id: id.clone(),
                        path: calib_path.clone(),
                        line: None,
                        message: e.to_string(),
                    });
                    None
                }
            },
            Err(e) => {
                issues.push(LoadIssue {
                    id: id.clone(),
                    path: calib_path.clone(),
                    line: None,
                    message: e.to_string(),
                });
                None
            }
        };
        let labels = match fs::read_to_string(&label_path) {
            Ok(text) => match parse_label_file(&text) {
                Ok(labels) => Some(labels),
                Err((line, e)) => {
                    issues.push(LoadIssue {
                        id: id.clone(),
                        path: label_path.clone(),
                        line: Some(line),
                        message: e.to_string(),
                    });
                    None
                }
            },
            Err(e) => {
                issues.push(LoadIssue {
                    id: id.clone(),
                    path: label_path.clone(),
                    line: None,
                    message: e.to_string(),
                });
                None
            }
        };
        if let (Some(intrinsics), Some(labels)) = (intrinsics, labels) {
            frames.push(Frame {
                id: id.clone(),
                intrinsics,
                labels,
            });
        }
    }
    if issues.is_empty() {
        Ok(Dataset { frames })
    } else {
        Err(LoadError::Issues(issues))
    }
}
