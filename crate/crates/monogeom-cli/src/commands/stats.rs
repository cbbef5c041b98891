//! `stats`: distribution report and static SVG plots from a geometry-record
//! CSV (as written by `geomdepth` or `simulate --mode fleet`).

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use monogeom::geodepth::GeometryRecord;
use monogeom::stats::{
    boxplot_summary, difficulty_report, histogram, standardize, HistogramBins, StatsError,
};

use crate::output::{write_artifact, Meta};
use crate::svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
pub struct Args {
    /// Geometry-record CSV (columns f,H,h_bbox,h_c,Z_gt,Z_geo,Z_err,H_err,h_err,
    /// leading id columns allowed).
    #[arg(long)]
    input: PathBuf,
    /// Directory for the report and SVG artifacts.
    #[arg(long)]
    out_dir: PathBuf,
    /// Report flavor; SVG plots are always written.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Histogram bin count.
    #[arg(long, default_value_t = 40)]
    bins: usize,
}

/// Parse a record CSV: `#` lines are metadata, the first other line is the
/// header naming at least the nine record columns.
pub fn read_records(path: &Path) -> Result<Vec<GeometryRecord>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| format!("{} has no header line", path.display()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let index_of = |name: &str| -> Result<usize, String> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| format!("{} is missing column `{name}`", path.display()))
    };
    let idx = [
        index_of("f")?,
        index_of("H")?,
        index_of("h_bbox")?,
        index_of("h_c")?,
        index_of("Z_gt")?,
        index_of("Z_geo")?,
        index_of("Z_err")?,
        index_of("H_err")?,
        index_of("h_err")?,
    ];
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let mut values = [0.0f64; 9];
        for (slot, &col) in idx.iter().enumerate() {
            let token = fields.get(col).ok_or_else(|| {
                format!("{} row {}: missing column {col}", path.display(), lineno + 1)
            })?;
            values[slot] = token.parse().map_err(|_| {
                format!(
                    "{} row {}: unparsable number `{token}`",
                    path.display(),
                    lineno + 1
                )
            })?;
        }
        records.push(GeometryRecord {
            focal: values[0],
            dim_height: values[1],
            h_bbox: values[2],
            h_center: values[3],
            depth_gt: values[4],
            depth_geo: values[5],
            depth_err: values[6],
            dim_height_err: values[7],
            h_bbox_err: values[8],
        });
    }
    Ok(records)
}

fn attribute_series(records: &[GeometryRecord]) -> [(&'static str, Vec<f64>); 6] {
    [
        ("Z", records.iter().map(|r| r.depth_gt).collect()),
        ("h_err", records.iter().map(|r| r.h_bbox_err).collect()),
        ("H_err", records.iter().map(|r| r.dim_height_err).collect()),
        ("Z_err", records.iter().map(|r| r.depth_err).collect()),
        ("H", records.iter().map(|r| r.dim_height).collect()),
        ("h_bbox", records.iter().map(|r| r.h_bbox).collect()),
    ]
}

pub fn run(args: Args) -> Result<(), String> {
    let records = read_records(&args.input)?;
    let report = difficulty_report(&records).map_err(|e| e.to_string())?;

    let mut meta = Meta::new("stats");
    meta.push("input", args.input.display())
        .push("records", records.len())
        .push("quantile_method", report.quantile_method)
        .push("whisker_rule", report.whisker_rule)
        .push(
            "ranking",
            report
                .ranking
                .iter()
                .map(|a| a.name)
                .collect::<Vec<_>>()
                .join(">"),
        )
        .push("matches_expected_order", report.matches_expected_order);

    let report_path = match args.format {
        Format::Csv => {
            let mut out = meta.csv_header();
            out.push_str("attribute,std_iqr,whisker_span,skewness,std_median,raw_median\n");
            for a in &report.ranking {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    a.name, a.iqr, a.whisker_span, a.skewness, a.std_median, a.raw_median
                ));
            }
            let path = args.out_dir.join("report.csv");
            write_artifact(Some(&path), &out)?;
            path
        }
        Format::Json => {
            let payload = serde_json::json!({
                "meta": meta.json_value(),
                "report": report,
            });
            let path = args.out_dir.join("report.json");
            write_artifact(Some(&path), &format!("{}\n", serde_json::to_string_pretty(&payload).unwrap()))?;
            path
        }
    };

    // Boxplot of the standardized attributes, one box per attribute.
    let mut boxes = Vec::new();
    for (name, series) in attribute_series(&records) {
        match standardize(&series) {
            Ok(std_series) => {
                boxes.push((name, boxplot_summary(&std_series).map_err(|e| e.to_string())?))
            }
            Err(StatsError::DegenerateVariance) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    write_artifact(
        Some(&args.out_dir.join("boxplot.svg")),
        &svg::boxplot("standardized depth-related attributes", &boxes),
    )?;

    // One histogram per attribute, raw units.
    let mut svg_count = 1;
    for (name, series) in attribute_series(&records) {
        let (edges, counts) =
            histogram(&series, HistogramBins::Count(args.bins)).map_err(|e| e.to_string())?;
        write_artifact(
            Some(&args.out_dir.join(format!("hist_{name}.svg"))),
            &svg::histogram(name, &edges, &counts),
        )?;
        svg_count += 1;
    }

    println!(
        "wrote {} and {svg_count} SVG plots to {}",
        report_path.display(),
        args.out_dir.display()
    );
    Ok(())
}
