//! Minimal static SVG rendering for boxplots and histograms. No external
//! plotting dependency; output is deterministic for identical inputs.

use std::fmt::Write;

use monogeom::stats::BoxplotSummary;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

struct YScale {
    lo: f64,
    hi: f64,
}

impl YScale {
    fn new(lo: f64, hi: f64) -> Self {
        let pad = (hi - lo).max(1e-9) * 0.08;
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn map(&self, v: f64) -> f64 {
        let t = (v - self.lo) / (self.hi - self.lo);
        HEIGHT - MARGIN_BOTTOM - t * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        x = WIDTH / 2.0,
    )
}

fn axis(out: &mut String, scale: &YScale) {
    let x0 = MARGIN_LEFT;
    let y0 = scale.map(scale.lo);
    let y1 = scale.map(scale.hi);
    let _ = writeln!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0:.2}\" x2=\"{x0}\" y2=\"{y1:.2}\" stroke=\"black\"/>"
    );
    for k in 0..=4 {
        let v = scale.lo + (scale.hi - scale.lo) * k as f64 / 4.0;
        let y = scale.map(v);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{x0}\" y2=\"{y:.2}\" stroke=\"black\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.2}</text>",
            x0 - 4.0,
            x0 - 8.0,
            y + 4.0
        );
    }
}

/// Side-by-side boxplots, one per named summary (median line, quartile box,
/// Tukey whiskers with caps, outlier count annotated below the name).
pub fn boxplot(title: &str, entries: &[(&str, BoxplotSummary)]) -> String {
    let lo = entries
        .iter()
        .map(|(_, s)| s.whisker_low)
        .fold(f64::INFINITY, f64::min);
    let hi = entries
        .iter()
        .map(|(_, s)| s.whisker_high)
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = YScale::new(lo, hi);
    let mut out = header(title);
    axis(&mut out, &scale);
    let span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let slot = span / entries.len() as f64;
    let box_w = (slot * 0.5).min(60.0);
    for (i, (name, s)) in entries.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let (x_left, x_right) = (cx - box_w / 2.0, cx + box_w / 2.0);
        let (yq1, yq3) = (scale.map(s.q1), scale.map(s.q3));
        let (ymed, ylo, yhi) = (
            scale.map(s.median),
            scale.map(s.whisker_low),
            scale.map(s.whisker_high),
        );
        let _ = writeln!(
            out,
            "<line x1=\"{cx:.2}\" y1=\"{ylo:.2}\" x2=\"{cx:.2}\" y2=\"{yq1:.2}\" stroke=\"black\"/>\n\
             <line x1=\"{cx:.2}\" y1=\"{yq3:.2}\" x2=\"{cx:.2}\" y2=\"{yhi:.2}\" stroke=\"black\"/>\n\
             <line x1=\"{:.2}\" y1=\"{ylo:.2}\" x2=\"{:.2}\" y2=\"{ylo:.2}\" stroke=\"black\"/>\n\
             <line x1=\"{:.2}\" y1=\"{yhi:.2}\" x2=\"{:.2}\" y2=\"{yhi:.2}\" stroke=\"black\"/>\n\
             <rect x=\"{x_left:.2}\" y=\"{yq3:.2}\" width=\"{box_w:.2}\" height=\"{:.2}\" \
             fill=\"#9ecae1\" stroke=\"black\"/>\n\
             <line x1=\"{x_left:.2}\" y1=\"{ymed:.2}\" x2=\"{x_right:.2}\" y2=\"{ymed:.2}\" \
             stroke=\"black\" stroke-width=\"2\"/>\n\
             <text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{name}</text>\n\
             <text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{} out</text>",
            cx - box_w / 4.0,
            cx + box_w / 4.0,
            cx - box_w / 4.0,
            cx + box_w / 4.0,
            (yq1 - yq3).max(0.5),
            HEIGHT - MARGIN_BOTTOM + 18.0,
            HEIGHT - MARGIN_BOTTOM + 32.0,
            s.outlier_count,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bar histogram over the given edges and counts.
pub fn histogram(title: &str, edges: &[f64], counts: &[usize]) -> String {
    let max_count = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let scale = YScale::new(0.0, max_count);
    let mut out = header(title);
    axis(&mut out, &scale);
    let span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let x_lo = edges[0];
    let x_hi = edges[edges.len() - 1];
    let x_map = |v: f64| MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo).max(1e-12) * span;
    let y0 = scale.map(0.0);
    for (i, &count) in counts.iter().enumerate() {
        let x = x_map(edges[i]);
        let w = (x_map(edges[i + 1]) - x).max(0.5);
        let y = scale.map(count as f64);
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{:.2}\" \
             fill=\"#fdae6b\" stroke=\"black\" stroke-width=\"0.5\"/>",
            (y0 - y).max(0.0),
        );
    }
    for k in 0..=4 {
        let v = x_lo + (x_hi - x_lo) * k as f64 / 4.0;
        let x = x_map(v);
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{v:.1}</text>",
            HEIGHT - MARGIN_BOTTOM + 18.0,
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use monogeom::stats::boxplot_summary;

    #[test]
    fn boxplot_svg_is_deterministic_and_well_formed() {
        let series: Vec<f64> = (1..=9).map(f64::from).collect();
        let s = boxplot_summary(&series).unwrap();
        let a = boxplot("demo", &[("Z", s), ("H", s)]);
        let b = boxplot("demo", &[("Z", s), ("H", s)]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<rect").count(), 3); // background + 2 boxes
    }

    #[test]
    fn histogram_svg_renders_all_bars() {
        let svg = histogram("demo", &[0.0, 1.0, 2.0, 3.0], &[4, 0, 2]);
        assert_eq!(svg.matches("<rect").count(), 4); // background + 3 bars
    }
}
