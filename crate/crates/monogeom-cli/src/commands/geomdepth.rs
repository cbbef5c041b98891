//! `geomdepth`: derive a geometry record per labeled object and export CSV.

use std::path::PathBuf;

use monogeom::geodepth::GeometryRecord;
use monogeom::kitti::{load_split, LoadError};

use crate::output::{dir_or_kitti_default, resolve_ids, write_artifact, Meta};

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
    /// Keep only this class (exact match); default keeps all real objects.
    #[arg(long)]
    class: Option<String>,
    /// Output CSV path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<(), String> {
    let labels = dir_or_kitti_default(args.labels, "labels", "label_2")?;
    let calib = dir_or_kitti_default(args.calib, "calib", "calib")?;
    let ids = resolve_ids(args.ids.as_deref(), &labels)?;
    let dataset = match load_split(&labels, &calib, &ids) {
        Ok(ds) => ds,
        Err(LoadError::EmptyIds) => return Err("no frame ids".into()),
        Err(e) => return Err(e.to_string()),
    };

    let mut rows = String::new();
    let mut count = 0usize;
    let mut skipped = 0usize;
    for frame in &dataset.frames {
        for (index, label) in frame.labels.iter().enumerate() {
            if label.is_dont_care() {
                continue;
            }
            if let Some(class) = &args.class {
                if &label.class_name != class {
                    continue;
                }
            }
            // Geometry needs a frontal object with positive extents.
            if label.location.z <= 0.0 || label.bbox_height() <= 0.0 || label.dims.height <= 0.0 {
                skipped += 1;
                continue;
            }
            let record = GeometryRecord::derive(
                frame.intrinsics.f_v,
                label.dims.height,
                label.bbox_height(),
                label.location.z,
            )
            .map_err(|e| format!("frame {} object {index}: {e}", frame.id))?;
            rows.push_str(&format!("{},{},{}\n", frame.id, index, record.csv_row()));
            count += 1;
        }
    }

    let mut meta = Meta::new("geomdepth");
    meta.push("labels", labels.display())
        .push("calib", calib.display())
        .push("frames", dataset.frames.len())
        .push("rows", count)
        .push("skipped_non_geometric", skipped);
    if let Some(class) = &args.class {
        meta.push("class", class);
    }

    let mut out = meta.csv_header();
    out.push_str("frame_id,index,");
    out.push_str(GeometryRecord::CSV_HEADER);
    out.push('\n');
    out.push_str(&rows);
    write_artifact(args.out.as_deref(), &out)
}
