//! Distribution summaries for the depth-attribute studies.
//!
//! Conventions are fixed so summaries are reproducible across tools:
//! quantiles use linear interpolation between order statistics (type 7),
//! whiskers extend to the most extreme data within 1.5 IQR of the quartile
//! fences (Tukey), and skewness is the adjusted Fisher-Pearson standardized
//! moment. Standardization subtracts the sample mean and divides by the
//! sample standard deviation (n - 1 denominator).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geodepth::GeometryRecord;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series has {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("series is constant (zero variance)")]
    DegenerateVariance,
    #[error("invalid histogram binning: {reason}")]
    BadBins { reason: String },
    #[error("difficulty report needs at least {min} records, got {n}")]
    TooFewRecords { n: usize, min: usize },
}

/// Five-number-style summary plus Tukey whiskers and skewness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outlier_count: usize,
    pub skewness: f64,
}

fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

fn sample_std(series: &[f64], mu: f64) -> f64 {
    let ss: f64 = series.iter().map(|x| (x - mu) * (x - mu)).sum();
    (ss / (series.len() - 1) as f64).sqrt()
}

/// Linear-interpolation (type 7) quantile of an already sorted series.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

/// Adjusted Fisher-Pearson standardized moment coefficient.
fn adjusted_skewness(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    let mu = mean(series);
    let m2 = series.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / n;
    let m3 = series.iter().map(|x| (x - mu).powi(3)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

/// Shift and scale to sample mean 0 and sample standard deviation 1.
pub fn standardize(series: &[f64]) -> Result<Vec<f64>, StatsError> {
    if series.len() < 2 {
        return Err(StatsError::TooShort {
            len: series.len(),
            min: 2,
        });
    }
    let mu = mean(series);
    let sigma = sample_std(series, mu);
    if !(sigma > 0.0) {
        return Err(StatsError::DegenerateVariance);
    }
    Ok(series.iter().map(|x| (x - mu) / sigma).collect())
}

/// Summarize a series of at least four values.
pub fn boxplot_summary(series: &[f64]) -> Result<BoxplotSummary, StatsError> {
    if series.len() < 4 {
        return Err(StatsError::TooShort {
            len: series.len(),
            min: 4,
        });
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_low = q1 - 1.5 * iqr;
    let fence_high = q3 + 1.5 * iqr;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&x| x >= fence_low)
        .unwrap_or(sorted[0]);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&x| x <= fence_high)
        .unwrap_or(sorted[sorted.len() - 1]);
    let outlier_count = sorted
        .iter()
        .filter(|&&x| x < fence_low || x > fence_high)
        .count();
    // Moments over the sorted series keep the summary exactly
    // permutation-invariant despite float non-associativity.
    Ok(BoxplotSummary {
        median,
        q1,
        q3,
        iqr,
        whisker_low,
        whisker_high,
        outlier_count,
        skewness: adjusted_skewness(&sorted),
    })
}

/// Histogram binning request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HistogramBins {
    Count(usize),
    Width(f64),
}

/// Histogram with strictly increasing edges; bins are right-open except the
/// last, which is closed, so a value sitting on an interior edge counts to
/// the right.
pub fn histogram(
    series: &[f64],
    bins: HistogramBins,
) -> Result<(Vec<f64>, Vec<usize>), StatsError> {
    if series.is_empty() {
        return Err(StatsError::TooShort { len: 0, min: 1 });
    }
    let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let edges: Vec<f64> = match bins {
        HistogramBins::Count(0) => {
            return Err(StatsError::BadBins {
                reason: "bin count must be positive".into(),
            })
        }
        HistogramBins::Count(k) => {
            let span = if hi > lo { hi - lo } else { 1.0 };
            (0..=k).map(|i| lo + span * i as f64 / k as f64).collect()
        }
        HistogramBins::Width(w) if !(w > 0.0) => {
            return Err(StatsError::BadBins {
                reason: format!("bin width must be positive, got {w}"),
            })
        }
        HistogramBins::Width(w) => {
            let k = (((hi - lo) / w).ceil() as usize).max(1);
            (0..=k).map(|i| lo + w * i as f64).collect()
        }
    };
    let k = edges.len() - 1;
    let mut counts = vec![0usize; k];
    for &x in series {
        // Rightmost bin whose left edge admits x; the final bin is closed.
        let mut idx = match edges[..k].binary_search_by(|e| e.total_cmp(&x)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if idx >= k {
            idx = k - 1;
        }
        counts[idx] += 1;
    }
    debug_assert_eq!(counts.iter().sum::<usize>(), series.len());
    Ok((edges, counts))
}

/// Per-attribute shape statistics over the standardized series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeStats {
    pub name: &'static str,
    /// IQR of the standardized series (0 for a constant attribute).
    pub iqr: f64,
    /// Whisker span of the standardized series.
    pub whisker_span: f64,
    pub skewness: f64,
    /// Median of the standardized series; near zero means the raw mean and
    /// median agree (a symmetry reading).
    pub std_median: f64,
    pub raw_median: f64,
}

/// Ranked difficulty table for the six depth-related attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyReport {
    /// Attributes sorted hardest-first by standardized IQR, ties broken by
    /// whisker span.
    pub ranking: Vec<AttributeStats>,
    /// Whether the computed ranking matches the expected difficulty order
    /// `Z > h_err > H_err > Z_err ~ H >> h_bbox` (the `Z_err`/`H`
    /// pair may appear in either order).
    pub matches_expected_order: bool,
    /// Conventions baked into the numbers, for reproducibility.
    pub quantile_method: &'static str,
    pub whisker_rule: &'static str,
}

/// Expected hardest-first attribute order; positions 3 and 4 are
/// interchangeable.
pub const EXPECTED_DIFFICULTY_ORDER: [&str; 6] =
    ["Z", "h_err", "H_err", "Z_err", "H", "h_bbox"];

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

/// Build the ranked attribute table from at least 100 records.
pub fn difficulty_report(records: &[GeometryRecord]) -> Result<DifficultyReport, StatsError> {
    const MIN_RECORDS: usize = 100;
    if records.len() < MIN_RECORDS {
        return Err(StatsError::TooFewRecords {
            n: records.len(),
            min: MIN_RECORDS,
        });
    }
    let mut stats = Vec::with_capacity(6);
    for (name, series) in attribute_series(records) {
        let mut sorted = series.clone();
        sorted.sort_by(f64::total_cmp);
        let raw_median = quantile_sorted(&sorted, 0.5);
        let entry = match standardize(&series) {
            Ok(std_series) => {
                let s = boxplot_summary(&std_series)?;
                AttributeStats {
                    name,
                    iqr: s.iqr,
                    whisker_span: s.whisker_high - s.whisker_low,
                    skewness: s.skewness,
                    std_median: s.median,
                    raw_median,
                }
            }
            // Constant attribute: all shape statistics collapse to zero.
            Err(StatsError::DegenerateVariance) => AttributeStats {
                name,
                iqr: 0.0,
                whisker_span: 0.0,
                skewness: 0.0,
                std_median: 0.0,
                raw_median,
            },
            Err(e) => return Err(e),
        };
        stats.push(entry);
    }
    stats.sort_by(|a, b| {
        b.iqr
            .total_cmp(&a.iqr)
            .then(b.whisker_span.total_cmp(&a.whisker_span))
    });
    let pos = |name: &str| stats.iter().position(|s| s.name == name).unwrap();
    let matches_expected_order = pos("Z") == 0
        && pos("h_err") == 1
        && pos("H_err") == 2
        && pos("h_bbox") == 5
        && (pos("Z_err") == 3 || pos("Z_err") == 4);
    Ok(DifficultyReport {
        ranking: stats,
        matches_expected_order,
        quantile_method: "linear interpolation (type 7)",
        whisker_rule: "Tukey 1.5 IQR",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{sample_fleet, FleetConfig, ParamDist};
    use proptest::prelude::*;

    #[test]
    fn standardize_small_series() {
        let out = standardize(&[1.0, 2.0, 3.0]).unwrap();
        let mu = mean(&out);
        let sigma = sample_std(&out, mu);
        assert!(mu.abs() < 1e-12);
        assert!((sigma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standardize_is_idempotent() {
        let series = vec![4.2, -1.0, 3.3, 8.8, 0.1];
        let once = standardize(&series).unwrap();
        let twice = standardize(&once).unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_rejects_constant_series() {
        assert_eq!(
            standardize(&[5.0, 5.0, 5.0]).unwrap_err(),
            StatsError::DegenerateVariance
        );
    }

    #[test]
    fn boxplot_one_through_nine() {
        // Hand evaluation of type-7 quantiles on 1..9: positions (n-1)*p
        // land exactly on order statistics 3, 5, 7.
        let series: Vec<f64> = (1..=9).map(f64::from).collect();
        let s = boxplot_summary(&series).unwrap();
        assert_eq!(s.median, 5.0);
        assert_eq!(s.q1, 3.0);
        assert_eq!(s.q3, 7.0);
        assert_eq!(s.iqr, 4.0);
        assert_eq!(s.whisker_low, 1.0);
        assert_eq!(s.whisker_high, 9.0);
        assert_eq!(s.outlier_count, 0);
        assert!(s.skewness.abs() < 1e-12);
    }

    #[test]
    fn boxplot_counts_outliers() {
        // Fences for 1..9 are [-3, 13]; 40 lies beyond the upper fence.
        let mut series: Vec<f64> = (1..=9).map(f64::from).collect();
        series.push(40.0);
        let s = boxplot_summary(&series).unwrap();
        assert_eq!(s.outlier_count, 1);
        assert!(s.whisker_high <= s.q3 + 1.5 * s.iqr);
        assert!(s.skewness > 0.0);
    }

    #[test]
    fn boxplot_symmetric_series_has_zero_skewness() {
        let series = vec![-3.0, -1.0, 0.0, 1.0, 3.0];
        assert!(boxplot_summary(&series).unwrap().skewness.abs() < 1e-12);
    }

    #[test]
    fn boxplot_is_permutation_invariant() {
        let a = vec![9.0, 2.0, 7.7, -1.0, 3.0, 4.0];
        let mut b = a.clone();
        b.reverse();
        b.swap(1, 4);
        assert_eq!(boxplot_summary(&a).unwrap(), boxplot_summary(&b).unwrap());
    }

    #[test]
    fn boxplot_too_short() {
        assert_eq!(
            boxplot_summary(&[1.0, 2.0, 3.0]).unwrap_err(),
            StatsError::TooShort { len: 3, min: 4 }
        );
    }

    #[test]
    fn histogram_single_bin_totality() {
        let series = vec![1.0, 2.0, 5.0, 2.5];
        let (edges, counts) = histogram(&series, HistogramBins::Count(1)).unwrap();
        assert_eq!(edges.len(), 2);
        assert_eq!(counts, vec![4]);
    }

    #[test]
    fn histogram_aligned_grid_counts_equally() {
        let series: Vec<f64> = (0..40).map(|i| (i % 4) as f64 + 0.5).collect();
        let (_, counts) = histogram(&series, HistogramBins::Count(4)).unwrap();
        assert_eq!(counts, vec![10, 10, 10, 10]);
    }

    #[test]
    fn histogram_interior_edge_goes_right() {
        // Edges 0,1,2; the value 1.0 sits on an interior edge and counts in
        // the right-hand bin.
        let series = vec![0.0, 1.0, 2.0];
        let (edges, counts) = histogram(&series, HistogramBins::Count(2)).unwrap();
        assert_eq!(edges, vec![0.0, 1.0, 2.0]);
        assert_eq!(counts, vec![1, 2]);
    }

    #[test]
    fn histogram_width_binning() {
        let series = vec![0.1, 0.4, 0.9, 1.4];
        let (edges, counts) = histogram(&series, HistogramBins::Width(0.5)).unwrap();
        assert_eq!(edges.len(), 4);
        assert_eq!(counts.iter().sum::<usize>(), 4);
        assert_eq!(counts, vec![2, 1, 1]);
    }

    #[test]
    fn histogram_rejects_bad_bins() {
        assert!(matches!(
            histogram(&[1.0], HistogramBins::Count(0)).unwrap_err(),
            StatsError::BadBins { .. }
        ));
        assert!(matches!(
            histogram(&[1.0], HistogramBins::Width(-1.0)).unwrap_err(),
            StatsError::BadBins { .. }
        ));
    }

    #[test]
    fn difficulty_report_on_synthetic_fleet() {
        let records = sample_fleet(&FleetConfig::car_like(4000, 11)).unwrap();
        let report = difficulty_report(&records).unwrap();
        let get = |name: &str| {
            report
                .ranking
                .iter()
                .find(|s| s.name == name)
                .unwrap()
                .clone()
        };
        assert!(get("Z").iqr > get("Z_err").iqr, "{report:#?}");
        // The skew-amplification reading: H_err skews harder than Z_err.
        assert!(get("H_err").skewness.abs() > get("Z_err").skewness.abs());
    }

    #[test]
    fn difficulty_report_constant_attribute_has_zero_iqr() {
        let mut cfg = FleetConfig::car_like(500, 5);
        cfg.dim_height = ParamDist::Constant(1.5);
        let records = sample_fleet(&cfg).unwrap();
        let report = difficulty_report(&records).unwrap();
        let h = report.ranking.iter().find(|s| s.name == "H").unwrap();
        assert_eq!(h.iqr, 0.0);
        assert_eq!(report.ranking.last().unwrap().name, "H");
    }

    #[test]
    fn difficulty_report_needs_enough_records() {
        let records = sample_fleet(&FleetConfig::car_like(99, 1)).unwrap();
        assert_eq!(
            difficulty_report(&records).unwrap_err(),
            StatsError::TooFewRecords { n: 99, min: 100 }
        );
    }

    proptest! {
        #[test]
        fn histogram_conserves_mass(
            values in proptest::collection::vec(-100.0f64..100.0, 1..200),
            k in 1usize..20,
        ) {
            let (edges, counts) = histogram(&values, HistogramBins::Count(k)).unwrap();
            prop_assert_eq!(counts.iter().sum::<usize>(), values.len());
            for pair in edges.windows(2) {
                prop_assert!(pair[1] > pair[0]);
            }
        }

        #[test]
        fn standardize_postcondition(
            values in proptest::collection::vec(-50.0f64..50.0, 2..100),
        ) {
            prop_assume!(values.iter().any(|&v| v != values[0]));
            let out = standardize(&values).unwrap();
            let mu = mean(&out);
            prop_assert!(mu.abs() < 1e-10);
            prop_assert!((sample_std(&out, mu) - 1.0).abs() < 1e-10);
        }
    }
}
