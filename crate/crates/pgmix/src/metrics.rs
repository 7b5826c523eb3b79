//! Mask-based detection evaluation: IoU, greedy matching, 101-point
//! interpolated average precision, area-band slices, and PR curves.
//!
//! Conventions follow the standard COCO protocol: AP thresholds
//! 0.50:0.05:0.95, precision interpolated to its running maximum from the
//! right and sampled on the 101-point recall grid, area bands at 32^2 and
//! 96^2 pixels. Ground truth outside an area band is ignored rather than
//! dropped: ignored ground truth can absorb detections (which then count as
//! neither TP nor FP), matching prefers non-ignored ground truth, and
//! unmatched detections whose own area falls outside the band are ignored.
//! Slices with no ground truth report the sentinel -1 and are excluded from
//! averages.
//!
//! Determinism: detections are processed in descending score with ties
//! broken by ascending input position; ground-truth IoU ties keep the
//! lowest-index candidate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BinaryMask;
use crate::io::{Detection, InstanceAnnotation, PerImage};

/// The ten AP thresholds 0.50:0.05:0.95.
pub fn iou_thresholds() -> [f64; 10] {
    let mut thrs = [0.0; 10];
    for (i, t) in thrs.iter_mut().enumerate() {
        *t = 0.5 + 0.05 * i as f64;
    }
    thrs
}

/// Number of points on the recall grid {0, 0.01, ..., 1}.
pub const RECALL_SAMPLES: usize = 101;

const AREA_SMALL_MAX: f64 = 32.0 * 32.0;
const AREA_MEDIUM_MAX: f64 = 96.0 * 96.0;

/// Half-open GT area band [lo, hi).
#[derive(Debug, Clone, Copy, PartialEq)]
struct AreaBand {
    lo: f64,
    hi: f64,
}

const BAND_ALL: AreaBand = AreaBand {
    lo: 0.0,
    hi: f64::INFINITY,
};
const BAND_SMALL: AreaBand = AreaBand {
    lo: 0.0,
    hi: AREA_SMALL_MAX,
};
const BAND_MEDIUM: AreaBand = AreaBand {
    lo: AREA_SMALL_MAX,
    hi: AREA_MEDIUM_MAX,
};
const BAND_LARGE: AreaBand = AreaBand {
    lo: AREA_MEDIUM_MAX,
    hi: f64::INFINITY,
};

impl AreaBand {
    fn contains(&self, area: usize) -> bool {
        let a = area as f64;
        a >= self.lo && a < self.hi
    }
}

/// IoU plus a flag marking the degenerate empty-vs-empty case, which is
/// defined as 0 so empty annotations flow through as unmatched items.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskIou {
    pub iou: f64,
    pub empty_pair: bool,
}

/// Intersection over union of two same-sized masks.
pub fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    Ok(mask_iou_flagged(a, b)?.iou)
}

/// [`mask_iou`] with the empty-pair flag exposed.
pub fn mask_iou_flagged(a: &BinaryMask, b: &BinaryMask) -> Result<MaskIou> {
    if !a.same_shape(b) {
        return Err(Error::domain(format!(
            "mask dimensions differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let mut intersection = 0usize;
    let mut union = 0usize;
    for (&x, &y) in a.bits().iter().zip(b.bits()) {
        if x && y {
            intersection += 1;
        }
        if x || y {
            union += 1;
        }
    }
    if union == 0 {
        return Ok(MaskIou {
            iou: 0.0,
            empty_pair: true,
        });
    }
    Ok(MaskIou {
        iou: intersection as f64 / union as f64,
        empty_pair: false,
    })
}

/// Indices of `dets` in descending-score processing order, ties broken by
/// ascending input index.
fn score_order(dets: &[&Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score().partial_cmp(&dets[a].score()).unwrap());
    order
}

/// Greedy same-image, same-category matching. Detections are processed in
/// descending score (ties by ascending input index); each takes the
/// still-unmatched ground truth with maximal IoU when that IoU reaches
/// `iou_thr` (IoU ties keep the lowest ground-truth index). Returns
/// `(det_index, matched_gt_index)` pairs in processing order.
pub fn match_instances(
    dets: &[Detection],
    gts: &[InstanceAnnotation],
    iou_thr: f64,
) -> Result<Vec<(usize, Option<usize>)>> {
    let det_refs: Vec<&Detection> = dets.iter().collect();
    let order = score_order(&det_refs);
    let mut iou = vec![vec![0.0f64; gts.len()]; dets.len()];
    for (d, det) in dets.iter().enumerate() {
        for (g, gt) in gts.iter().enumerate() {
            iou[d][g] = mask_iou(det.mask(), gt.mask())?;
        }
    }
    let mut gt_taken = vec![false; gts.len()];
    let mut out = Vec::with_capacity(dets.len());
    for &d in &order {
        let mut best: Option<(usize, f64)> = None;
        for g in 0..gts.len() {
            if gt_taken[g] {
                continue;
            }
            let v = iou[d][g];
            if v < iou_thr {
                continue;
            }
            match best {
                None => best = Some((g, v)),
                Some((_, bv)) if v > bv => best = Some((g, v)),
                _ => {}
            }
        }
        if let Some((g, _)) = best {
            gt_taken[g] = true;
            out.push((d, Some(g)));
        } else {
            out.push((d, None));
        }
    }
    Ok(out)
}

/// One detection's contribution to a PR accumulation.
#[derive(Debug, Clone, Copy)]
struct DetEntry {
    score: f64,
    tp: bool,
    ignored: bool,
}

/// Per-image, per-category working set: score-sorted detections and the IoU
/// matrix against ground truth.
struct CatImage<'a> {
    dets: Vec<&'a Detection>,
    gts: Vec<&'a InstanceAnnotation>,
    /// iou[det rank][gt index]
    iou: Vec<Vec<f64>>,
}

fn build_cat_image<'a>(
    dets: &'a [Detection],
    gts: &'a [InstanceAnnotation],
    category: Option<u32>,
    max_dets: usize,
) -> Result<CatImage<'a>> {
    let det_refs: Vec<&Detection> = dets
        .iter()
        .filter(|d| category.is_none_or(|c| d.category_id() == c))
        .collect();
    let gt_refs: Vec<&InstanceAnnotation> = gts
        .iter()
        .filter(|g| category.is_none_or(|c| g.category_id() == c))
        .collect();
    let mut sorted: Vec<&Detection> = score_order(&det_refs)
        .iter()
        .map(|&i| det_refs[i])
        .collect();
    sorted.truncate(max_dets);
    let mut iou = vec![vec![0.0f64; gt_refs.len()]; sorted.len()];
    for (d, det) in sorted.iter().enumerate() {
        for (g, gt) in gt_refs.iter().enumerate() {
            iou[d][g] = mask_iou(det.mask(), gt.mask())?;
        }
    }
    Ok(CatImage {
        dets: sorted,
        gts: gt_refs,
        iou,
    })
}

/// Match one image's detections at `thr` within `band`, producing PR entries
/// and the non-ignored GT count.
fn eval_image(ci: &CatImage, thr: f64, band: AreaBand) -> (Vec<DetEntry>, usize) {
    let gt_ignored: Vec<bool> = ci.gts.iter().map(|g| !band.contains(g.area())).collect();
    // Non-ignored ground truth first; stable within each group.
    let mut gt_order: Vec<usize> = (0..ci.gts.len()).collect();
    gt_order.sort_by_key(|&g| gt_ignored[g]);
    let num_gt = gt_ignored.iter().filter(|&&ig| !ig).count();

    let mut gt_taken = vec![false; ci.gts.len()];
    let mut entries = Vec::with_capacity(ci.dets.len());
    for (d, det) in ci.dets.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for &g in &gt_order {
            if gt_taken[g] {
                continue;
            }
            // With a non-ignored match in hand, never trade into the
            // ignored section.
            if let Some((bg, _)) = best {
                if !gt_ignored[bg] && gt_ignored[g] {
                    break;
                }
            }
            let v = ci.iou[d][g];
            if v < thr {
                continue;
            }
            match best {
                None => best = Some((g, v)),
                Some((_, bv)) if v > bv => best = Some((g, v)),
                _ => {}
            }
        }
        let entry = match best {
            Some((g, _)) => {
                gt_taken[g] = true;
                DetEntry {
                    score: det.score(),
                    tp: !gt_ignored[g],
                    ignored: gt_ignored[g],
                }
            }
            None => DetEntry {
                score: det.score(),
                tp: false,
                ignored: !band.contains(det.area()),
            },
        };
        entries.push(entry);
    }
    (entries, num_gt)
}

/// Interpolated precision sampled on the 101-point recall grid, or `None`
/// when the slice has no ground truth.
fn sampled_precisions(entries: &mut [DetEntry], num_gt: usize) -> Option<Vec<f64>> {
    if num_gt == 0 {
        return None;
    }
    // Global ranking: descending score, stable over accumulation order.
    entries.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
    let flags: Vec<bool> = entries
        .iter()
        .filter(|e| !e.ignored)
        .map(|e| e.tp)
        .collect();

    let n = flags.len();
    let mut recall = Vec::with_capacity(n);
    let mut precision = Vec::with_capacity(n);
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &is_tp in &flags {
        if is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / num_gt as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    // Right-to-left running maximum.
    for i in (0..n.saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }

    let mut samples = Vec::with_capacity(RECALL_SAMPLES);
    let mut idx = 0usize;
    for j in 0..RECALL_SAMPLES {
        let r = j as f64 / 100.0;
        while idx < n && recall[idx] < r {
            idx += 1;
        }
        samples.push(if idx < n { precision[idx] } else { 0.0 });
    }
    Some(samples)
}

fn ap_from_samples(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Align detection images to the ground-truth universe: the GT file defines
/// which images are evaluated; detections for unknown images are ignored.
fn paired_images<'a>(
    dets: &'a [PerImage<Detection>],
    gts: &'a [PerImage<InstanceAnnotation>],
) -> Vec<(&'a [Detection], &'a [InstanceAnnotation])> {
    gts.iter()
        .map(|g| {
            let d = dets
                .iter()
                .find(|d| d.image_id == g.image_id)
                .map(|d| d.items.as_slice())
                .unwrap_or(&[]);
            (d, g.items.as_slice())
        })
        .collect()
}

fn collect_entries(images: &[CatImage], thr: f64, band: AreaBand) -> (Vec<DetEntry>, usize) {
    let mut entries = Vec::new();
    let mut num_gt = 0usize;
    for ci in images {
        let (mut e, n) = eval_image(ci, thr, band);
        entries.append(&mut e);
        num_gt += n;
    }
    (entries, num_gt)
}

/// Average precision for a single category across images at one threshold.
/// Returns -1 when the ground truth is empty.
pub fn average_precision(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
    iou_thr: f64,
) -> Result<f64> {
    let images = build_images(dets, gts, None, usize::MAX)?;
    let (mut entries, num_gt) = collect_entries(&images, iou_thr, BAND_ALL);
    Ok(match sampled_precisions(&mut entries, num_gt) {
        Some(samples) => ap_from_samples(&samples),
        None => -1.0,
    })
}

/// Precision/recall samples at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub threshold: f64,
    /// (recall, precision) at the 101-point recall grid.
    pub points: Vec<(f64, f64)>,
}

/// Interpolated PR curve for a single category. The mean of the precision
/// samples equals [`average_precision`] on the same inputs. With no ground
/// truth the precision samples are all zero.
pub fn pr_curve(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
    iou_thr: f64,
) -> Result<PrCurve> {
    let images = build_images(dets, gts, None, usize::MAX)?;
    let (mut entries, num_gt) = collect_entries(&images, iou_thr, BAND_ALL);
    let samples =
        sampled_precisions(&mut entries, num_gt).unwrap_or_else(|| vec![0.0; RECALL_SAMPLES]);
    let points = samples
        .iter()
        .enumerate()
        .map(|(j, &p)| (j as f64 / 100.0, p))
        .collect();
    Ok(PrCurve {
        threshold: iou_thr,
        points,
    })
}

fn build_images<'a>(
    dets: &'a [PerImage<Detection>],
    gts: &'a [PerImage<InstanceAnnotation>],
    category: Option<u32>,
    max_dets: usize,
) -> Result<Vec<CatImage<'a>>> {
    paired_images(dets, gts)
        .into_iter()
        .map(|(d, g)| build_cat_image(d, g, category, max_dets))
        .collect()
}

/// The six AP slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApSummary {
    pub map: f64,
    pub ap50: f64,
    pub ap75: f64,
    pub ap_s: f64,
    pub ap_m: f64,
    pub ap_l: f64,
}

/// Overall and per-category evaluation results. Slices without ground truth
/// hold the sentinel -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub map: f64,
    pub ap50: f64,
    pub ap75: f64,
    pub ap_s: f64,
    pub ap_m: f64,
    pub ap_l: f64,
    pub per_category: std::collections::BTreeMap<u32, ApSummary>,
}

/// Evaluator knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// Per-image, per-category cap on scored detections.
    pub max_detections: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_detections: 100,
        }
    }
}

/// Full evaluation with default configuration.
pub fn coco_map(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
) -> Result<EvalResult> {
    coco_map_with(dets, gts, &EvalConfig::default())
}

/// Full evaluation: mAP over the ten thresholds, AP50/AP75, and area-band
/// APs, overall and per category. Categories are the union of those present
/// on either side; per-category means skip -1 slices.
pub fn coco_map_with(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    let thresholds = iou_thresholds();
    let mut categories: BTreeSet<u32> = BTreeSet::new();
    for g in gts {
        categories.extend(g.items.iter().map(|i| i.category_id()));
    }
    for d in dets {
        categories.extend(d.items.iter().map(|i| i.category_id()));
    }

    let mut per_category = std::collections::BTreeMap::new();
    for &cat in &categories {
        let images = build_images(dets, gts, Some(cat), cfg.max_detections)?;
        let band_mean = |band: AreaBand| -> f64 {
            let mut acc = 0.0;
            let mut defined = false;
            for &thr in &thresholds {
                let (mut entries, num_gt) = collect_entries(&images, thr, band);
                match sampled_precisions(&mut entries, num_gt) {
                    Some(samples) => {
                        acc += ap_from_samples(&samples);
                        defined = true;
                    }
                    None => return -1.0,
                }
            }
            if defined {
                acc / thresholds.len() as f64
            } else {
                -1.0
            }
        };
        let ap_at = |thr: f64| -> f64 {
            let (mut entries, num_gt) = collect_entries(&images, thr, BAND_ALL);
            match sampled_precisions(&mut entries, num_gt) {
                Some(samples) => ap_from_samples(&samples),
                None => -1.0,
            }
        };
        per_category.insert(
            cat,
            ApSummary {
                map: band_mean(BAND_ALL),
                ap50: ap_at(0.5),
                ap75: ap_at(0.75),
                ap_s: band_mean(BAND_SMALL),
                ap_m: band_mean(BAND_MEDIUM),
                ap_l: band_mean(BAND_LARGE),
            },
        );
    }

    let mean_over_defined = |field: fn(&ApSummary) -> f64| -> f64 {
        let defined: Vec<f64> = per_category
            .values()
            .map(field)
            .filter(|&v| v >= 0.0)
            .collect();
        if defined.is_empty() {
            -1.0
        } else {
            defined.iter().sum::<f64>() / defined.len() as f64
        }
    };

    Ok(EvalResult {
        map: mean_over_defined(|s| s.map),
        ap50: mean_over_defined(|s| s.ap50),
        ap75: mean_over_defined(|s| s.ap75),
        ap_s: mean_over_defined(|s| s.ap_s),
        ap_m: mean_over_defined(|s| s.ap_m),
        ap_l: mean_over_defined(|s| s.ap_l),
        per_category,
    })
}
