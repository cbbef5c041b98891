//! `validate`: load a split and report parse failures and label
//! inconsistencies.

use std::path::PathBuf;

use clap::ValueEnum;
use monogeom::camera::alpha_from_rotation;
use monogeom::kitti::{load_split, LoadError};

use crate::output::{dir_or_kitti_default, resolve_ids, Meta};

/// Observation-angle slack before a label is flagged; annotation rounding
/// stays well under this.
const ALPHA_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
pub struct Args {
    /// Label directory (default $MONOGEOM_KITTI_ROOT/label_2).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Calibration directory (default $MONOGEOM_KITTI_ROOT/calib).
    #[arg(long)]
    calib: Option<PathBuf>,
    /// File with one frame id per line (default: all label files).
    #[arg(long)]
    ids: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Fail (exit 1) on consistency warnings, not just parse errors.
    #[arg(long)]
    strict: bool,
}

#[derive(serde::Serialize)]
struct Warning {
    frame: String,
    object: usize,
    message: String,
}

pub fn run(args: Args) -> Result<(), String> {
    let labels = dir_or_kitti_default(args.labels, "labels", "label_2")?;
    let calib = dir_or_kitti_default(args.calib, "calib", "calib")?;
    let ids = resolve_ids(args.ids.as_deref(), &labels)?;

    let dataset = match load_split(&labels, &calib, &ids) {
        Ok(ds) => ds,
        Err(LoadError::EmptyIds) => return Err("no frame ids to validate".into()),
        Err(LoadError::Issues(issues)) => {
            let mut lines = String::new();
            for issue in &issues {
                lines.push_str(&format!("{issue}\n"));
            }
            return Err(format!("{} load issue(s):\n{lines}", issues.len()));
        }
    };

    let mut objects = 0usize;
    let mut dont_care = 0usize;
    let mut classes: std::collections::BTreeMap<String, usize> = Default::default();
    let mut warnings: Vec<Warning> = Vec::new();
    for frame in &dataset.frames {
        for (i, label) in frame.labels.iter().enumerate() {
            objects += 1;
            *classes.entry(label.class_name.clone()).or_default() += 1;
            if label.is_dont_care() {
                dont_care += 1;
                continue;
            }
            let mut warn = |message: String| {
                warnings.push(Warning {
                    frame: frame.id.clone(),
                    object: i,
                    message,
                })
            };
            if label.bbox.right <= label.bbox.left || label.bbox.bottom <= label.bbox.top {
                warn(format!("degenerate 2D box {:?}", label.bbox));
            }
            if !label.dims.is_positive() {
                warn(format!("nonpositive dimensions {:?}", label.dims));
            }
            if !(0.0..=1.0).contains(&label.truncation) {
                warn(format!("truncation {} outside [0, 1]", label.truncation));
            }
            if !(0..=3).contains(&label.occlusion) {
                warn(format!("occlusion {} outside 0..=3", label.occlusion));
            }
            if label.location.z > 0.0 {
                let expected =
                    alpha_from_rotation(label.rotation_y, label.location.x, label.location.z);
                let dev = monogeom::camera::wrap_angle(label.alpha - expected).abs();
                if dev > ALPHA_TOLERANCE {
                    warn(format!(
                        "alpha {} deviates {dev:.4} rad from rotation_y - atan2(x, z)",
                        label.alpha
                    ));
                }
            }
        }
    }

    let mut meta = Meta::new("validate");
    meta.push("labels", labels.display())
        .push("calib", calib.display())
        .push("frames", dataset.frames.len())
        .push("objects", objects)
        .push("dont_care", dont_care)
        .push("warnings", warnings.len());

    match args.format {
        Format::Text => {
            print!("{}", meta.csv_header());
            for (class, count) in &classes {
                println!("# class {class}={count}");
            }
            for w in &warnings {
                println!("warning: frame {} object {}: {}", w.frame, w.object, w.message);
            }
            println!(
                "validated {} frames, {} objects ({} warnings)",
                dataset.frames.len(),
                objects,
                warnings.len()
            );
        }
        Format::Json => {
            let payload = serde_json::json!({
                "meta": meta.json_value(),
                "frames": dataset.frames.len(),
                "objects": objects,
                "dont_care": dont_care,
                "classes": classes,
                "warnings": warnings,
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
    }

    if args.strict && !warnings.is_empty() {
        return Err(format!("{} consistency warning(s)", warnings.len()));
    }
    Ok(())
}
