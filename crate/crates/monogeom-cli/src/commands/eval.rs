//! `eval`: average precision at 40 recall positions over a prediction
//! directory, reported per difficulty level.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use monogeom::eval::{average_precision_r40, ApResult, Difficulty, EvalConfig, Metric};
use monogeom::kitti::{parse_label_file, ObjectLabel};

use crate::output::{dir_or_kitti_default, resolve_ids, write_artifact, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    #[value(name = "3d")]
    ThreeD,
    Bev,
}

#[derive(clap::Args)]
pub struct Args {
    /// Ground-truth label directory (default $MONOGEOM_KITTI_ROOT/label_2).
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Prediction directory (16-field lines; missing files mean no
    /// detections for that frame).
    #[arg(long)]
    pred: PathBuf,
    /// Class to evaluate, exact match.
    #[arg(long, default_value = "Car")]
    class: String,
    /// IoU threshold (KITTI uses 0.7 for Car, 0.5 for Pedestrian/Cyclist).
    #[arg(long, default_value_t = 0.7)]
    iou: f64,
    #[arg(long, value_enum, default_value = "3d")]
    metric: MetricArg,
    /// File with one frame id per line (default: all ground-truth files).
    #[arg(long)]
    ids: Option<PathBuf>,
    /// Report path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the PR operating points and 40-point samples as CSV.
    #[arg(long)]
    pr_curve: Option<PathBuf>,
}

fn load_frames(dir: &Path, ids: &[String], missing_ok: bool) -> Result<Vec<Vec<ObjectLabel>>, String> {
    let mut frames = Vec::with_capacity(ids.len());
    for id in ids {
        let path = dir.join(format!("{id}.txt"));
        match std::fs::read_to_string(&path) {
            Ok(text) => frames.push(
                parse_label_file(&text)
                    .map_err(|(line, e)| format!("{}:{line}: {e}", path.display()))?,
            ),
            Err(_) if missing_ok => frames.push(Vec::new()),
            Err(e) => return Err(format!("cannot read {}: {e}", path.display())),
        }
    }
    Ok(frames)
}

fn percent(ap: f64) -> f64 {
    (ap * 100.0 * 1000.0).round() / 1000.0
}

pub fn run(args: Args) -> Result<(), String> {
    let gt_dir = dir_or_kitti_default(args.gt, "gt", "label_2")?;
    let ids = resolve_ids(args.ids.as_deref(), &gt_dir)?;
    let gts = load_frames(&gt_dir, &ids, false)?;
    let preds = load_frames(&args.pred, &ids, true)?;

    let metric = match args.metric {
        MetricArg::ThreeD => Metric::Ap3d,
        MetricArg::Bev => Metric::ApBev,
    };
    let mut results: Vec<(Difficulty, ApResult)> = Vec::new();
    for difficulty in [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard] {
        let config = EvalConfig {
            class_name: args.class.clone(),
            iou_threshold: args.iou,
            difficulty,
            metric,
        };
        let r = average_precision_r40(&preds, &gts, &config).map_err(|e| e.to_string())?;
        results.push((difficulty, r));
    }

    let mut meta = Meta::new("eval");
    meta.push("gt", gt_dir.display())
        .push("pred", args.pred.display())
        .push("class", &args.class)
        .push("iou_threshold", args.iou)
        .push(
            "metric",
            match metric {
                Metric::Ap3d => "AP_3D",
                Metric::ApBev => "AP_BEV",
            },
        )
        .push("frames", ids.len());

    let mut ap = serde_json::Map::new();
    for (difficulty, r) in &results {
        ap.insert(
            difficulty.as_str().to_string(),
            serde_json::json!({
                "ap_percent": percent(r.ap),
                "relevant_gt": r.relevant_gt,
                "true_positives": r.true_positives,
                "false_positives": r.false_positives,
            }),
        );
    }
    let payload = serde_json::json!({
        "meta": meta.json_value(),
        "ap": serde_json::Value::Object(ap),
    });
    write_artifact(
        args.out.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&payload).unwrap()),
    )?;

    if let Some(pr_path) = &args.pr_curve {
        let mut out = meta.csv_header();
        out.push_str("difficulty,kind,recall,precision\n");
        for (difficulty, r) in &results {
            for (recall, precision) in &r.curve.points {
                out.push_str(&format!(
                    "{},point,{recall},{precision}\n",
                    difficulty.as_str()
                ));
            }
            for (k, p) in r.curve.sampled.iter().enumerate() {
                out.push_str(&format!(
                    "{},sample,{},{p}\n",
                    difficulty.as_str(),
                    (k + 1) as f64 / 40.0
                ));
            }
        }
        write_artifact(Some(pr_path), &out)?;
    }
    Ok(())
}
