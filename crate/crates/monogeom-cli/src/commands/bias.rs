//! `bias-sweep`: evaluate the camera-height bias closed forms, either for a
//! single scenario or swept over wheel depth or height ratio.

use std::path::PathBuf;

use clap::ValueEnum;
use monogeom::bias::{analyze_bias, bias_sweep, BiasResult, SweepVariable};

use crate::config;
use crate::output::{write_artifact, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    WheelDepth,
    Gamma,
}

#[derive(clap::Args)]
pub struct Args {
    /// Scenario defaults file (TOML, `[bias]` section).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cam_height: Option<f64>,
    #[arg(long)]
    obj_height: Option<f64>,
    #[arg(long)]
    wheel_depth: Option<f64>,
    /// Hood slope run l_a, meters.
    #[arg(long)]
    hood_run: Option<f64>,
    /// Roof front to mid-length run l_b1, meters.
    #[arg(long)]
    lb1: Option<f64>,
    /// Mid-length to rear run l_b2, meters.
    #[arg(long)]
    lb2: Option<f64>,
    /// Quantity to sweep; omit for a single-scenario row.
    #[arg(long, value_enum)]
    vary: Option<Vary>,
    /// Sweep range start (required with --vary).
    #[arg(long, requires = "vary")]
    min: Option<f64>,
    /// Sweep range end (required with --vary).
    #[arg(long, requires = "vary")]
    max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Output CSV path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn csv_row(value: f64, r: &BiasResult) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        value,
        r.regime.as_str(),
        r.l_bias,
        r.sigma,
        r.z_geo,
        r.z_err
    )
}

pub fn run(args: Args) -> Result<(), String> {
    let cfg = config::load(args.config.as_deref())?;
    let mut scenario = cfg.bias.scenario();
    if let Some(v) = args.cam_height {
        scenario.cam_height = v;
    }
    if let Some(v) = args.obj_height {
        scenario.obj_height = v;
    }
    if let Some(v) = args.wheel_depth {
        scenario.wheel_depth = v;
    }
    if let Some(v) = args.hood_run {
        scenario.hood_run = v;
    }
    if let Some(v) = args.lb1 {
        scenario.body_run_front = v;
    }
    if let Some(v) = args.lb2 {
        scenario.body_run_rear = v;
    }

    let mut meta = Meta::new("bias-sweep");
    meta.push("cam_height", scenario.cam_height)
        .push("obj_height", scenario.obj_height)
        .push("gamma", scenario.gamma())
        .push("wheel_depth", scenario.wheel_depth)
        .push("hood_run", scenario.hood_run)
        .push("body_run_front", scenario.body_run_front)
        .push("body_run_rear", scenario.body_run_rear);

    let mut body = String::from("varied_value,regime,l_bias,sigma,Z_geo,Z_err\n");
    match args.vary {
        None => {
            meta.push("varied", "none");
            let r = analyze_bias(&scenario).map_err(|e| e.to_string())?;
            body.push_str(&csv_row(scenario.wheel_depth, &r));
        }
        Some(vary) => {
            let (min, max) = (args.min.unwrap(), args.max.unwrap());
            let variable = match vary {
                Vary::WheelDepth => SweepVariable::WheelDepth,
                Vary::Gamma => SweepVariable::Gamma,
            };
            meta.push(
                "varied",
                match vary {
                    Vary::WheelDepth => "wheel_depth",
                    Vary::Gamma => "gamma",
                },
            )
            .push("range", format!("{min}..{max}"))
            .push("steps", args.steps);
            let series = bias_sweep(&scenario, variable, (min, max), args.steps)
                .map_err(|e| e.to_string())?;
            for (value, r) in &series {
                body.push_str(&csv_row(*value, r));
            }
        }
    }

    let mut out = meta.csv_header();
    out.push_str(&body);
    write_artifact(args.out.as_deref(), &out)
}
