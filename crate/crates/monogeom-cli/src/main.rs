//! `monogeom` — command-line front end for the geometry toolkit.
//!
//! Subcommands: `validate`, `geomdepth`, `bias-sweep`, `simulate`, `stats`,
//! `eval`. All outputs are deterministic for identical flags and seed and
//! open with a metadata header echoing the tool version and configuration.
//!
//! Exit codes: 0 success, 1 domain error (structured message on stderr,
//! JSON with `--json-errors`), 2 usage error.

mod commands;
mod config;
mod output;
mod svg;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "monogeom",
    version,
    about = "Monocular 3D-detection geometry toolkit",
    after_help = "Environment:\n  MONOGEOM_KITTI_ROOT  default root for --labels/--calib/--gt \
                  (expects label_2/ and calib/ inside)\n\nCSV column orders are frozen per major \
                  version; see each subcommand's --help."
)]
struct Cli {
    /// Print errors as machine-parsable JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a KITTI split and report format or consistency problems.
    Validate(commands::validate::Args),
    /// Export per-object geometry records (CSV columns: frame_id,index,f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err).
    Geomdepth(commands::geomdepth::Args),
    /// Evaluate the camera-height bias closed forms over a swept variable
    /// (CSV columns: varied_value,regime,l_bias,sigma,Z_geo,Z_err).
    BiasSweep(commands::bias::Args),
    /// Run the brute-force scene projector: single poses, orientation and
    /// depth sweeps, or fleet sampling.
    Simulate(commands::simulate::Args),
    /// Distribution report and SVG plots from a geometry-record CSV.
    Stats(commands::stats::Args),
    /// KITTI-protocol average precision at 40 recall positions.
    Eval(commands::eval::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(args) => commands::validate::run(args),
        Command::Geomdepth(args) => commands::geomdepth::run(args),
        Command::BiasSweep(args) => commands::bias::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Eval(args) => commands::eval::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            if cli.json_errors {
                let payload = serde_json::json!({ "error": message });
                eprintln!("{payload}");
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::FAILURE
        }
    }
}
