//! `simulate`: drive the brute-force scene projector from the command line.

use std::path::PathBuf;

use clap::ValueEnum;
use monogeom::geodepth::GeometryRecord;
use monogeom::kitti::CameraIntrinsics;
use monogeom::sim::{sample_fleet, Scene, SimObservation, VehicleShape};
use monogeom::Dimensions;

use crate::config;
use crate::output::{write_artifact, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Project a single pose.
    Observe,
    /// Sweep yaw over [0, 2*pi].
    OrientationSweep,
    /// Sweep center depth over [--min-depth, --max-depth].
    DepthSweep,
    /// Sample a randomized fleet and emit geometry records.
    Fleet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Cuboid,
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Config file for fleet distributions (TOML, `[fleet]` section).
    #[arg(long)]
    config: Option<PathBuf>,

    // Camera.
    #[arg(long, default_value_t = 721.5377)]
    focal: f64,
    #[arg(long, default_value_t = 609.5593)]
    principal_u: f64,
    #[arg(long, default_value_t = 172.854)]
    principal_v: f64,
    /// Camera height above ground, meters (overrides --gamma).
    #[arg(long)]
    cam_height: Option<f64>,
    /// Camera-to-object height ratio; height = gamma * object height.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,

    // Vehicle.
    #[arg(long, default_value_t = 1.5)]
    obj_height: f64,
    #[arg(long, default_value_t = 1.6)]
    obj_width: f64,
    #[arg(long, default_value_t = 4.0)]
    obj_length: f64,
    #[arg(long, value_enum, default_value = "cuboid")]
    profile: Profile,
    #[arg(long, default_value_t = 1.0)]
    hood_run: f64,
    #[arg(long, default_value_t = 0.5)]
    hood_drop: f64,

    // Pose.
    #[arg(long, default_value_t = 0.0)]
    yaw: f64,
    #[arg(long, default_value_t = 0.0)]
    lateral: f64,
    /// Center depth for observe / orientation-sweep, meters.
    #[arg(long, default_value_t = 35.0)]
    depth: f64,

    // Sweeps.
    #[arg(long, default_value_t = 5.0)]
    min_depth: f64,
    #[arg(long, default_value_t = 80.0)]
    max_depth: f64,
    /// Grid size for sweeps (orientation default 73, depth default 200).
    #[arg(long)]
    steps: Option<usize>,
    /// Z_err spread below which a depth sweep counts as
    /// perspective-invariant.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    // Fleet.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

const SERIES_HEADER: &str =
    "yaw,z_center,h_bbox,z_geo,z_err,nearest_vertex_depth,bbox_left,bbox_top,bbox_right,bbox_bottom";

fn series_row(yaw: f64, o: &SimObservation) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        yaw,
        o.z_center,
        o.h_bbox,
        o.z_geo,
        o.z_err,
        o.nearest_vertex_depth,
        o.bbox.left,
        o.bbox.top,
        o.bbox.right,
        o.bbox.bottom
    )
}

fn spread(series: &[(f64, SimObservation)]) -> f64 {
    let errs = series.iter().map(|(_, o)| o.z_err);
    errs.clone().fold(f64::NEG_INFINITY, f64::max) - errs.fold(f64::INFINITY, f64::min)
}

pub fn run(args: Args) -> Result<(), String> {
    let dims = Dimensions::new(args.obj_height, args.obj_width, args.obj_length);
    let vehicle = match args.profile {
        Profile::Cuboid => VehicleShape::cuboid(dims),
        Profile::Trapezoid => VehicleShape::trapezoid(dims, args.hood_run, args.hood_drop),
    };
    let camera_height = args.cam_height.unwrap_or(args.gamma * args.obj_height);
    let scene = Scene {
        intrinsics: CameraIntrinsics::simple(
            args.focal,
            args.focal,
            args.principal_u,
            args.principal_v,
        ),
        camera_height,
        vehicle,
    };

    let mut meta = Meta::new("simulate");
    meta.push("focal", args.focal)
        .push("camera_height", camera_height)
        .push("dims", format!("{}x{}x{}", dims.height, dims.width, dims.length))
        .push(
            "profile",
            match args.profile {
                Profile::Cuboid => "cuboid",
                Profile::Trapezoid => "trapezoid",
            },
        )
        .push("lateral", args.lateral);

    let content = match args.mode {
        Mode::Observe => {
            meta.push("mode", "observe")
                .push("yaw", args.yaw)
                .push("depth", args.depth);
            let obs = scene
                .observe(args.yaw, args.depth, args.lateral)
                .map_err(|e| e.to_string())?;
            render_series(&meta, &[(args.yaw, obs)], args.format)
        }
        Mode::OrientationSweep => {
            let steps = args.steps.unwrap_or(73);
            meta.push("mode", "orientation-sweep")
                .push("depth", args.depth)
                .push("steps", steps);
            let series = scene
                .orientation_sweep(args.depth, args.lateral, steps)
                .map_err(|e| e.to_string())?;
            render_series(&meta, &series, args.format)
        }
        Mode::DepthSweep => {
            let steps = args.steps.unwrap_or(200);
            let series = scene
                .depth_sweep(args.yaw, args.lateral, (args.min_depth, args.max_depth), steps)
                .map_err(|e| e.to_string())?;
            let s = spread(&series);
            meta.push("mode", "depth-sweep")
                .push("yaw", args.yaw)
                .push("range", format!("{}..{}", args.min_depth, args.max_depth))
                .push("steps", steps)
                .push("z_err_spread", format!("{s:e}"))
                .push("perspective_invariant", s < args.tolerance);
            // The varied depth travels in the z_center column; yaw is fixed.
            let series: Vec<(f64, SimObservation)> =
                series.into_iter().map(|(_, o)| (args.yaw, o)).collect();
            render_series(&meta, &series, args.format)
        }
        Mode::Fleet => {
            let cfg = config::load(args.config.as_deref())?;
            let fleet = cfg.fleet.fleet_config(args.n, args.seed)?;
            meta.push("mode", "fleet")
                .push("n", fleet.n)
                .push("seed", fleet.seed);
            let records = sample_fleet(&fleet).map_err(|e| e.to_string())?;
            render_records(&meta, &records, args.format)
        }
    };
    write_artifact(args.out.as_deref(), &content)
}

fn render_series(meta: &Meta, series: &[(f64, SimObservation)], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = meta.csv_header();
            out.push_str(SERIES_HEADER);
            out.push('\n');
            for (yaw, obs) in series {
                out.push_str(&series_row(*yaw, obs));
            }
            out
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = series
                .iter()
                .map(|(yaw, obs)| {
                    let mut value = serde_json::to_value(obs).unwrap();
                    value["yaw"] = serde_json::json!(yaw);
                    value
                })
                .collect();
            let payload = serde_json::json!({
                "meta": meta.json_value(),
                "series": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&payload).unwrap())
        }
    }
}

fn render_records(meta: &Meta, records: &[GeometryRecord], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = meta.csv_header();
            out.push_str("index,");
            out.push_str(GeometryRecord::CSV_HEADER);
            out.push('\n');
            for (i, r) in records.iter().enumerate() {
                out.push_str(&format!("{i},{}\n", r.csv_row()));
            }
            out
        }
        Format::Json => {
            let payload = serde_json::json!({
                "meta": meta.json_value(),
                "records": records,
            });
            format!("{}\n", serde_json::to_string_pretty(&payload).unwrap())
        }
    }
}
