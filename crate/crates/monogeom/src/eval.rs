//! KITTI-protocol evaluation: rotated bird's-eye-view IoU via convex polygon
//! clipping, 3D IoU, difficulty assignment, and average precision at 40
//! recall positions.
//!
//! Matching is greedy in descending score order: each prediction takes the
//! unmatched ground truth with the highest overlap, and counts as a true
//! positive when that overlap clears the threshold. Predictions that instead
//! land on an ignored ground truth (same class, stricter difficulty) or on a
//! `DontCare` region are dropped from the tally rather than counted as false
//! positives. Interpolated precision is the running maximum toward higher
//! recall, sampled at recall = k/40 for k = 1..=40.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::{rotate_y, Box3D};
use crate::kitti::ObjectLabel;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("degenerate footprint: width x length = {w} x {l}")]
    DegenerateFootprint { w: f64, l: f64 },
    #[error("prediction {index} in frame {frame} has no score")]
    UnscoredPrediction { frame: usize, index: usize },
    #[error("prediction frames ({preds}) and ground-truth frames ({gts}) differ")]
    FrameCountMismatch { preds: usize, gts: usize },
    #[error("IoU threshold must lie in (0, 1], got {threshold}")]
    BadThreshold { threshold: f64 },
}

/// KITTI difficulty stratum. An object is evaluated at its own level and
/// every harder one, so `Easy < Moderate < Hard` in set-inclusion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
}

impl Difficulty {
    pub fn as_str(&self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Moderate => "moderate",
            Difficulty::Hard => "hard",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Ap3d,
    ApBev,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Exact, case-sensitive class name.
    pub class_name: String,
    pub iou_threshold: f64,
    pub difficulty: Difficulty,
    pub metric: Metric,
}

const MIN_BBOX_HEIGHT: [f64; 3] = [40.0, 25.0, 25.0];
const MAX_OCCLUSION: [i32; 3] = [0, 1, 2];
const MAX_TRUNCATION: [f64; 3] = [0.15, 0.30, 0.50];
/// Minimum 2D overlap (intersection over prediction area) for a false
/// positive to be absorbed by a `DontCare` region.
const DONTCARE_OVERLAP: f64 = 0.5;

/// KITTI difficulty from box height, occlusion, and truncation; `None`
/// means the object is ignored at every level.
pub fn assign_difficulty(label: &ObjectLabel) -> Option<Difficulty> {
    let height = label.bbox_height();
    for (i, difficulty) in [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard]
        .into_iter()
        .enumerate()
    {
        if height >= MIN_BBOX_HEIGHT[i]
            && label.occlusion <= MAX_OCCLUSION[i]
            && label.truncation <= MAX_TRUNCATION[i]
        {
            return Some(difficulty);
        }
    }
    None
}

/// Bird's-eye footprint corners of a box in the x-z plane, in order.
fn footprint(b: &Box3D) -> [(f64, f64); 4] {
    let hl = b.dims.length / 2.0;
    let hw = b.dims.width / 2.0;
    let mut corners = [(0.0, 0.0); 4];
    for (i, (dx, dz)) in [(hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw)].into_iter().enumerate() {
        let (rx, rz) = rotate_y(b.rotation_y, dx, dz);
        corners[i] = (b.location.x + rx, b.location.z + rz);
    }
    corners
}

/// Shoelace area, positive regardless of winding.
fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % poly.len()];
        twice += x1 * y2 - x2 * y1;
    }
    twice.abs() / 2.0
}

fn signed_area(poly: &[(f64, f64)]) -> f64 {
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % poly.len()];
        twice += x1 * y2 - x2 * y1;
    }
    twice / 2.0
}

/// Sutherland-Hodgman clip of a convex subject polygon by a convex clip
/// polygon. Both wound consistently; the clip polygon is made
/// counterclockwise first.
fn clip_convex(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut clip = clip.to_vec();
    if signed_area(&clip) < 0.0 {
        clip.reverse();
    }
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let (ax, ay) = clip[i];
        let (bx, by) = clip[(i + 1) % clip.len()];
        // Inside = left of edge a->b for a CCW clip polygon.
        let side = |&(px, py): &(f64, f64)| (bx - ax) * (py - ay) - (by - ay) * (px - ax);
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let s_cur = side(&cur);
            let s_prev = side(&prev);
            if s_cur >= 0.0 {
                if s_prev < 0.0 {
                    output.push(intersect(prev, cur, (ax, ay), (bx, by)));
                }
                output.push(cur);
            } else if s_prev >= 0.0 {
                output.push(intersect(prev, cur, (ax, ay), (bx, by)));
            }
        }
    }
    output
}

fn intersect(
    (x1, y1): (f64, f64),
    (x2, y2): (f64, f64),
    (x3, y3): (f64, f64),
    (x4, y4): (f64, f64),
) -> (f64, f64) {
    let denom = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4);
    let t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / denom;
    (x1 + t * (x2 - x1), y1 + t * (y2 - y1))
}

fn check_footprint(b: &Box3D) -> Result<(), EvalError> {
    if !(b.dims.width > 0.0 && b.dims.length > 0.0) {
        return Err(EvalError::DegenerateFootprint {
            w: b.dims.width,
            l: b.dims.length,
        });
    }
    Ok(())
}

/// Intersection area of the two rotated footprints.
fn bev_intersection_area(a: &Box3D, b: &Box3D) -> f64 {
    let inter = clip_convex(&footprint(a), &footprint(b));
    polygon_area(&inter)
}

/// Rotated-rectangle IoU in the ground plane.
pub fn bev_iou(a: &Box3D, b: &Box3D) -> Result<f64, EvalError> {
    check_footprint(a)?;
    check_footprint(b)?;
    let inter = bev_intersection_area(a, b);
    let area_a = a.dims.width * a.dims.length;
    let area_b = b.dims.width * b.dims.length;
    Ok(inter / (area_a + area_b - inter))
}

/// 3D IoU: BEV intersection times vertical overlap of the y extents
/// `[location.y - height, location.y]`.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> Result<f64, EvalError> {
    check_footprint(a)?;
    check_footprint(b)?;
    if !(a.dims.height > 0.0 && b.dims.height > 0.0) {
        return Err(EvalError::DegenerateFootprint {
            w: a.dims.height,
            l: b.dims.height,
        });
    }
    let overlap_y = (a.location.y.min(b.location.y)
        - (a.location.y - a.dims.height).max(b.location.y - b.dims.height))
    .max(0.0);
    let inter = bev_intersection_area(a, b) * overlap_y;
    let vol_a = a.dims.width * a.dims.length * a.dims.height;
    let vol_b = b.dims.width * b.dims.length * b.dims.height;
    Ok(inter / (vol_a + vol_b - inter))
}

/// Precision-recall curve with its 40 interpolated samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PRCurve {
    /// Operating points `(recall, precision)` after each prediction.
    pub points: Vec<(f64, f64)>,
    /// Interpolated precision at recall = k/40, k = 1..=40.
    pub sampled: Vec<f64>,
}

/// Average precision and its supporting curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApResult {
    /// Average precision in [0, 1].
    pub ap: f64,
    pub curve: PRCurve,
    pub relevant_gt: usize,
    pub true_positives: usize,
    pub false_positives: usize,
}

struct RankedPrediction {
    frame: usize,
    index: usize,
    score: f64,
}

/// Average precision at 40 recall positions. `pred_frames[i]` and
/// `gt_frames[i]` describe the same image; every prediction of the
/// configured class must carry a score.
pub fn average_precision_r40(
    pred_frames: &[Vec<ObjectLabel>],
    gt_frames: &[Vec<ObjectLabel>],
    config: &EvalConfig,
) -> Result<ApResult, EvalError> {
    if pred_frames.len() != gt_frames.len() {
        return Err(EvalError::FrameCountMismatch {
            preds: pred_frames.len(),
            gts: gt_frames.len(),
        });
    }
    if !(config.iou_threshold > 0.0 && config.iou_threshold <= 1.0) {
        return Err(EvalError::BadThreshold {
            threshold: config.iou_threshold,
        });
    }

    // Per-frame ground-truth partition: relevant (counted), ignored (same
    // class, stricter difficulty or unassignable), and DontCare regions.
    let mut relevant: Vec<Vec<&ObjectLabel>> = Vec::with_capacity(gt_frames.len());
    let mut ignored: Vec<Vec<&ObjectLabel>> = Vec::with_capacity(gt_frames.len());
    let mut dontcare: Vec<Vec<&ObjectLabel>> = Vec::with_capacity(gt_frames.len());
    for frame in gt_frames {
        let mut rel = Vec::new();
        let mut ign = Vec::new();
        let mut dc = Vec::new();
        for gt in frame {
            if gt.is_dont_care() {
                dc.push(gt);
            } else if gt.class_name == config.class_name {
                match assign_difficulty(gt) {
                    Some(d) if d <= config.difficulty => rel.push(gt),
                    _ => ign.push(gt),
                }
            }
        }
        relevant.push(rel);
        ignored.push(ign);
        dontcare.push(dc);
    }
    let total_gt: usize = relevant.iter().map(Vec::len).sum();

    let mut ranked = Vec::new();
    for (frame, preds) in pred_frames.iter().enumerate() {
        for (index, p) in preds.iter().enumerate() {
            if p.class_name != config.class_name {
                continue;
            }
            let score = p
                .score
                .ok_or(EvalError::UnscoredPrediction { frame, index })?;
            ranked.push(RankedPrediction {
                frame,
                index,
                score,
            });
        }
    }
    // Descending score; stable on ties, so frame/index order breaks them.
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));

    let overlap = |p: &ObjectLabel, g: &ObjectLabel| -> Result<f64, EvalError> {
        match config.metric {
            Metric::Ap3d => iou_3d(&p.box3d(), &g.box3d()),
            Metric::ApBev => bev_iou(&p.box3d(), &g.box3d()),
        }
    };

    let mut matched: Vec<Vec<bool>> = relevant.iter().map(|v| vec![false; v.len()]).collect();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut points = Vec::with_capacity(ranked.len());
    for r in &ranked {
        let pred = &pred_frames[r.frame][r.index];
        // Best unmatched relevant GT; equal overlaps keep the earlier GT.
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in relevant[r.frame].iter().enumerate() {
            if matched[r.frame][gi] {
                continue;
            }
            let iou = overlap(pred, gt)?;
            if best.map_or(true, |(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        if let Some((gi, iou)) = best {
            if iou >= config.iou_threshold {
                matched[r.frame][gi] = true;
                tp += 1;
                points.push(pr_point(tp, fp, total_gt));
                continue;
            }
        }
        // Stricter-difficulty object of the same class: not an error.
        let mut absorbed = false;
        for gt in &ignored[r.frame] {
            if overlap(pred, gt)? >= config.iou_threshold {
                absorbed = true;
                break;
            }
        }
        // DontCare region: suppress by 2D overlap.
        if !absorbed {
            let area = pred.bbox.area();
            if area > 0.0 {
                for dc in &dontcare[r.frame] {
                    if pred.bbox.intersection_area(&dc.bbox) / area >= DONTCARE_OVERLAP {
                        absorbed = true;
                        break;
                    }
                }
            }
        }
        if !absorbed {
            fp += 1;
            points.push(pr_point(tp, fp, total_gt));
        }
    }

    let sampled = interpolate_r40(&points);
    let ap = sampled.iter().sum::<f64>() / 40.0;
    Ok(ApResult {
        ap,
        curve: PRCurve { points, sampled },
        relevant_gt: total_gt,
        true_positives: tp,
        false_positives: fp,
    })
}

fn pr_point(tp: usize, fp: usize, total_gt: usize) -> (f64, f64) {
    let recall = if total_gt == 0 {
        0.0
    } else {
        tp as f64 / total_gt as f64
    };
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    (recall, precision)
}

/// Interpolated precision at recall k/40: the maximum precision among
/// operating points whose recall reaches that far.
fn interpolate_r40(points: &[(f64, f64)]) -> Vec<f64> {
    (1..=40)
        .map(|k| {
            let r = k as f64 / 40.0;
            points
                .iter()
                .filter(|(recall, _)| *recall >= r - 1e-12)
                .map(|(_, precision)| *precision)
                .fold(0.0, f64::max)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{Dimensions, Point3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn boxed(x: f64, z: f64, w: f64, l: f64, yaw: f64) -> Box3D {
        Box3D::new(Dimensions::new(1.5, w, l), Point3::new(x, 1.6, z), yaw)
    }

    #[test]
    fn identical_boxes_have_unit_iou() {
        for yaw in [0.0, 0.4, 1.2, -2.0] {
            let b = boxed(1.0, 20.0, 1.6, 4.0, yaw);
            assert!((bev_iou(&b, &b).unwrap() - 1.0).abs() < 1e-9);
            assert!((iou_3d(&b, &b).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_squares_offset_half() {
        let a = boxed(0.0, 0.0, 1.0, 1.0, 0.0);
        let b = boxed(0.5, 0.0, 1.0, 1.0, 0.0);
        assert!((bev_iou(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn rotated_square_against_axis_aligned() {
        // Unit square vs the same square rotated 45 degrees: intersection
        // is the regular octagon of area 2 * (sqrt(2) - 1).
        let a = boxed(0.0, 0.0, 1.0, 1.0, 0.0);
        let b = boxed(0.0, 0.0, 1.0, 1.0, std::f64::consts::FRAC_PI_4);
        let inter = 2.0 * (2.0f64.sqrt() - 1.0);
        let expect = inter / (2.0 - inter);
        assert!((bev_iou(&a, &b).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn disjoint_footprints() {
        let a = boxed(0.0, 0.0, 1.0, 1.0, 0.1);
        let b = boxed(10.0, 0.0, 1.0, 1.0, 0.7);
        assert_eq!(bev_iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_footprint_rejected() {
        let a = boxed(0.0, 0.0, 0.0, 1.0, 0.0);
        let b = boxed(0.0, 0.0, 1.0, 1.0, 0.0);
        assert!(matches!(
            bev_iou(&a, &b).unwrap_err(),
            EvalError::DegenerateFootprint { .. }
        ));
    }

    #[test]
    fn iou_3d_vertical_cases() {
        let a = boxed(0.0, 10.0, 1.0, 1.0, 0.0);
        // Same footprint shifted up by H/2: overlap H/2 of union 1.5 H.
        let mut b = a;
        b.location.y -= a.dims.height / 2.0;
        assert!((iou_3d(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-9);
        // Disjoint in y.
        b.location.y = a.location.y - 2.0 * a.dims.height;
        assert_eq!(iou_3d(&a, &b).unwrap(), 0.0);
    }

    fn mc_bev_iou(a: &Box3D, b: &Box3D, samples: u64, seed: u64) -> f64 {
        // Monte-Carlo area oracle: sample the union's bounding box and
        // classify points against both footprints directly.
        let fa = footprint(a);
        let fb = footprint(b);
        let xs: Vec<f64> = fa.iter().chain(fb.iter()).map(|p| p.0).collect();
        let zs: Vec<f64> = fa.iter().chain(fb.iter()).map(|p| p.1).collect();
        let (x0, x1) = (
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let (z0, z1) = (
            zs.iter().copied().fold(f64::INFINITY, f64::min),
            zs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let inside = |poly: &[(f64, f64); 4], x: f64, z: f64| {
            let mut sign = 0.0f64;
            for i in 0..4 {
                let (ax, az) = poly[i];
                let (bx, bz) = poly[(i + 1) % 4];
                let cross = (bx - ax) * (z - az) - (bz - az) * (x - ax);
                if cross.abs() < 1e-15 {
                    continue;
                }
                if sign == 0.0 {
                    sign = cross.signum();
                } else if sign != cross.signum() {
                    return false;
                }
            }
            true
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut hits_inter, mut hits_union) = (0u64, 0u64);
        for _ in 0..samples {
            let x = rng.gen_range(x0..x1);
            let z = rng.gen_range(z0..z1);
            let in_a = inside(&fa, x, z);
            let in_b = inside(&fb, x, z);
            if in_a && in_b {
                hits_inter += 1;
            }
            if in_a || in_b {
                hits_union += 1;
            }
        }
        hits_inter as f64 / hits_union as f64
    }

    #[test]
    fn bev_iou_matches_monte_carlo_on_rotated_pair() {
        let a = boxed(0.1, 0.3, 1.4, 3.8, 0.6);
        let b = boxed(0.4, -0.2, 1.7, 4.2, -0.9);
        let exact = bev_iou(&a, &b).unwrap();
        let mc = mc_bev_iou(&a, &b, 2_000_000, 12345);
        assert!((exact - mc).abs() < 2e-3, "exact {exact} vs mc {mc}");
    }

    fn gt(class: &str, height_px: f64, occ: i32, trunc: f64) -> ObjectLabel {
        ObjectLabel {
            class_name: class.into(),
            truncation: trunc,
            occlusion: occ,
            alpha: 0.0,
            bbox: crate::camera::BBox2D::new(100.0, 100.0, 150.0, 100.0 + height_px),
            dims: Dimensions::new(1.5, 1.6, 4.0),
            location: Point3::new(0.0, 1.6, 20.0),
            rotation_y: 0.0,
            score: None,
        }
    }

    #[test]
    fn difficulty_thresholds() {
        assert_eq!(
            assign_difficulty(&gt("Car", 50.0, 0, 0.0)),
            Some(Difficulty::Easy)
        );
        assert_eq!(
            assign_difficulty(&gt("Car", 30.0, 1, 0.2)),
            Some(Difficulty::Moderate)
        );
        assert_eq!(
            assign_difficulty(&gt("Car", 26.0, 2, 0.45)),
            Some(Difficulty::Hard)
        );
        assert_eq!(assign_difficulty(&gt("Car", 20.0, 0, 0.0)), None);
        assert_eq!(assign_difficulty(&gt("Car", 50.0, 3, 0.0)), None);
    }

    fn car_at(z: f64, x: f64, score: Option<f64>) -> ObjectLabel {
        let mut label = gt("Car", 60.0, 0, 0.0);
        label.location = Point3::new(x, 1.6, z);
        label.score = score;
        label
    }

    fn config(metric: Metric) -> EvalConfig {
        EvalConfig {
            class_name: "Car".into(),
            iou_threshold: 0.7,
            difficulty: Difficulty::Moderate,
            metric,
        }
    }

    #[test]
    fn perfect_detector_scores_one() {
        let gts = vec![
            vec![car_at(10.0, 0.0, None), car_at(30.0, 3.0, None)],
            vec![car_at(22.0, -2.0, None)],
        ];
        let preds: Vec<Vec<ObjectLabel>> = gts
            .iter()
            .enumerate()
            .map(|(i, frame)| {
                frame
                    .iter()
                    .enumerate()
                    .map(|(j, g)| {
                        let mut p = g.clone();
                        p.score = Some(0.9 - 0.1 * (i * 2 + j) as f64);
                        p
                    })
                    .collect()
            })
            .collect();
        for metric in [Metric::Ap3d, Metric::ApBev] {
            let r = average_precision_r40(&preds, &gts, &config(metric)).unwrap();
            assert!((r.ap - 1.0).abs() < 1e-12, "ap = {}", r.ap);
            assert_eq!(r.true_positives, 3);
            assert_eq!(r.false_positives, 0);
        }
    }

    #[test]
    fn no_predictions_scores_zero() {
        let gts = vec![vec![car_at(10.0, 0.0, None)]];
        let preds = vec![vec![]];
        let r = average_precision_r40(&preds, &gts, &config(Metric::Ap3d)).unwrap();
        assert_eq!(r.ap, 0.0);
    }

    #[test]
    fn fp_above_tp_halves_ap() {
        // One GT; a false positive outranks the true positive. Operating
        // points: (0, 0) then (1, 0.5); interpolation holds 0.5 everywhere.
        let gts = vec![vec![car_at(10.0, 0.0, None)]];
        let preds = vec![vec![car_at(10.0, 8.0, Some(0.9)), car_at(10.0, 0.0, Some(0.8))]];
        let r = average_precision_r40(&preds, &gts, &config(Metric::Ap3d)).unwrap();
        assert!((r.ap - 0.5).abs() < 1e-12, "ap = {}", r.ap);
    }

    #[test]
    fn unscored_prediction_is_contract_error() {
        let gts = vec![vec![car_at(10.0, 0.0, None)]];
        let preds = vec![vec![car_at(10.0, 0.0, None)]];
        assert_eq!(
            average_precision_r40(&preds, &gts, &config(Metric::Ap3d)).unwrap_err(),
            EvalError::UnscoredPrediction { frame: 0, index: 0 }
        );
    }

    #[test]
    fn harder_gt_is_ignored_not_fp() {
        // The only GT is hard; evaluating at easy treats a matching
        // prediction as neither TP nor FP.
        let mut hard_gt = car_at(15.0, 0.0, None);
        hard_gt.occlusion = 2;
        let gts = vec![vec![hard_gt.clone()]];
        let mut pred = hard_gt;
        pred.score = Some(0.9);
        let preds = vec![vec![pred]];
        let cfg = EvalConfig {
            difficulty: Difficulty::Easy,
            ..config(Metric::Ap3d)
        };
        let r = average_precision_r40(&preds, &gts, &cfg).unwrap();
        assert_eq!(r.relevant_gt, 0);
        assert_eq!(r.false_positives, 0);
        assert_eq!(r.ap, 0.0);
    }

    #[test]
    fn dontcare_absorbs_overlapping_fp() {
        let mut dc = gt("DontCare", 40.0, -1, -1.0);
        dc.bbox = crate::camera::BBox2D::new(200.0, 50.0, 300.0, 120.0);
        let gts = vec![vec![car_at(10.0, 0.0, None), dc]];
        // Prediction far from the GT in 3D but sitting on the DontCare
        // region in the image.
        let mut stray = car_at(50.0, 10.0, Some(0.95));
        stray.bbox = crate::camera::BBox2D::new(210.0, 60.0, 290.0, 115.0);
        let hit = car_at(10.0, 0.0, Some(0.9));
        let preds = vec![vec![stray, hit]];
        let r = average_precision_r40(&preds, &gts, &config(Metric::Ap3d)).unwrap();
        assert_eq!(r.false_positives, 0);
        assert!((r.ap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_permutation_leaves_ap_unchanged() {
        let gts = vec![
            vec![car_at(10.0, 0.0, None)],
            vec![car_at(30.0, 3.0, None), car_at(18.0, -4.0, None)],
            vec![],
        ];
        let preds = vec![
            vec![car_at(10.0, 0.2, Some(0.7))],
            vec![car_at(30.0, 3.1, Some(0.9)), car_at(18.0, 4.0, Some(0.6))],
            vec![car_at(40.0, 0.0, Some(0.5))],
        ];
        let cfg = config(Metric::ApBev);
        let base = average_precision_r40(&preds, &gts, &cfg).unwrap().ap;
        let perm = [2usize, 0, 1];
        let preds_p: Vec<_> = perm.iter().map(|&i| preds[i].clone()).collect();
        let gts_p: Vec<_> = perm.iter().map(|&i| gts[i].clone()).collect();
        let shuffled = average_precision_r40(&preds_p, &gts_p, &cfg).unwrap().ap;
        assert!((base - shuffled).abs() < 1e-12);
    }

    #[test]
    fn ap_nonincreasing_in_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let mut gts = Vec::new();
            let mut preds = Vec::new();
            for _ in 0..6 {
                let n_gt = rng.gen_range(0..4);
                let mut frame_gt = Vec::new();
                let mut frame_pred = Vec::new();
                for _ in 0..n_gt {
                    let z = rng.gen_range(8.0..40.0);
                    let x = rng.gen_range(-10.0..10.0);
                    frame_gt.push(car_at(z, x, None));
                    if rng.gen_bool(0.8) {
                        let mut p = car_at(
                            z + rng.gen_range(-1.0..1.0),
                            x + rng.gen_range(-1.0..1.0),
                            Some(rng.gen_range(0.1..1.0)),
                        );
                        p.rotation_y = rng.gen_range(-0.3..0.3);
                        frame_pred.push(p);
                    }
                }
                for _ in 0..rng.gen_range(0..3) {
                    frame_pred.push(car_at(
                        rng.gen_range(8.0..40.0),
                        rng.gen_range(-10.0..10.0),
                        Some(rng.gen_range(0.1..1.0)),
                    ));
                }
                gts.push(frame_gt);
                preds.push(frame_pred);
            }
            let mut last = f64::INFINITY;
            for thr in [0.3, 0.5, 0.7, 0.9] {
                let cfg = EvalConfig {
                    iou_threshold: thr,
                    ..config(Metric::ApBev)
                };
                let ap = average_precision_r40(&preds, &gts, &cfg).unwrap().ap;
                assert!(ap <= last + 1e-12, "AP rose from {last} to {ap} at {thr}");
                last = ap;
            }
        }
    }

    #[test]
    fn brute_force_pr_enumeration_oracle() {
        // Independent oracle: for every score threshold, recount TP/FP from
        // scratch, then interpolate the resulting PR set the same way.
        let gts = vec![
            vec![car_at(10.0, 0.0, None), car_at(30.0, 3.0, None)],
            vec![car_at(22.0, -2.0, None)],
        ];
        let preds = vec![
            vec![car_at(10.0, 0.1, Some(0.9)), car_at(30.0, 9.0, Some(0.8))],
            vec![car_at(22.0, -2.1, Some(0.7)), car_at(22.0, 5.0, Some(0.2))],
        ];
        let cfg = config(Metric::ApBev);
        let got = average_precision_r40(&preds, &gts, &cfg).unwrap();

        let mut scores: Vec<f64> = preds
            .iter()
            .flatten()
            .filter_map(|p| p.score)
            .collect();
        scores.sort_by(f64::total_cmp);
        let mut points = Vec::new();
        for thr in &scores {
            let kept: Vec<Vec<ObjectLabel>> = preds
                .iter()
                .map(|f| {
                    f.iter()
                        .filter(|p| p.score.unwrap() >= *thr)
                        .cloned()
                        .collect()
                })
                .collect();
            let r = average_precision_r40(&kept, &gts, &cfg).unwrap();
            let tp = r.true_positives as f64;
            let fp = r.false_positives as f64;
            points.push((tp / 3.0, if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 }));
        }
        let expected_ap = (1..=40)
            .map(|k| {
                let r = k as f64 / 40.0;
                points
                    .iter()
                    .filter(|(recall, _)| *recall >= r - 1e-12)
                    .map(|(_, p)| *p)
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            / 40.0;
        assert!(
            (got.ap - expected_ap).abs() < 1e-12,
            "{} vs {}",
            got.ap,
            expected_ap
        );
    }
}
