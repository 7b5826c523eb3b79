//! Brute-force reference evaluator, written as a direct transcription of
//! the evaluation protocol with no code shared with the crate's evaluator.
//!
//! Protocol: per category and image, detections in descending score (stable
//! on input order, capped per image), greedily matched to the free ground
//! truth with the highest IoU at or above the threshold (first one on ties,
//! non-ignored ground truth preferred and never abandoned for an ignored
//! one). Ground truth outside the area band is ignored; a detection matched
//! to ignored ground truth is dropped, as is an unmatched detection whose
//! own area is outside the band. AP = mean of right-max interpolated
//! precision over the 101-point recall grid; -1 when a slice has no ground
//! truth.

use std::collections::BTreeMap;

use pgmix::io::{Detection, InstanceAnnotation, PerImage};
use pgmix::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefSummary {
    pub map: f64,
    pub ap50: f64,
    pub ap75: f64,
    pub ap_s: f64,
    pub ap_m: f64,
    pub ap_l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefResult {
    pub overall: RefSummary,
    pub per_category: BTreeMap<u32, RefSummary>,
}

fn iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let mut inter = 0usize;
    let mut union = 0usize;
    for y in 0..a.height() {
        for x in 0..a.width() {
            let p = a.get(x, y);
            let q = b.get(x, y);
            if p && q {
                inter += 1;
            }
            if p || q {
                union += 1;
            }
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn in_band(area: usize, band: (f64, f64)) -> bool {
    let a = area as f64;
    a >= band.0 && a < band.1
}

/// Stable descending sort by score via insertion sort, so the tie-break is
/// explicit: earlier input index first.
fn stable_sort_by_score(dets: &[&Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::with_capacity(dets.len());
    for i in 0..dets.len() {
        let mut pos = order.len();
        while pos > 0 && dets[order[pos - 1]].score() < dets[i].score() {
            pos -= 1;
        }
        order.insert(pos, i);
    }
    order
}

/// AP for one (category, threshold, band) slice; -1 without ground truth.
fn slice_ap(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
    category: u32,
    thr: f64,
    band: (f64, f64),
    max_dets: usize,
) -> f64 {
    // (score, tp, ignored), accumulated image by image in ranked order.
    let mut entries: Vec<(f64, bool, bool)> = Vec::new();
    let mut num_gt = 0usize;

    for gt_image in gts {
        let gt_items: Vec<&InstanceAnnotation> = gt_image
            .items
            .iter()
            .filter(|g| g.category_id() == category)
            .collect();
        let det_items: Vec<&Detection> = dets
            .iter()
            .find(|d| d.image_id == gt_image.image_id)
            .map(|d| {
                d.items
                    .iter()
                    .filter(|x| x.category_id() == category)
                    .collect()
            })
            .unwrap_or_default();

        let gt_ignored: Vec<bool> = gt_items.iter().map(|g| !in_band(g.area(), band)).collect();
        num_gt += gt_ignored.iter().filter(|&&ig| !ig).count();

        // Non-ignored ground truth first, each group in input order.
        let mut gt_order: Vec<usize> = Vec::new();
        for (g, &ig) in gt_ignored.iter().enumerate() {
            if !ig {
                gt_order.push(g);
            }
        }
        for (g, &ig) in gt_ignored.iter().enumerate() {
            if ig {
                gt_order.push(g);
            }
        }

        let mut ranked = stable_sort_by_score(&det_items);
        ranked.truncate(max_dets);

        let mut taken = vec![false; gt_items.len()];
        for &d in &ranked {
            let det = det_items[d];
            let mut best_g: Option<usize> = None;
            let mut best_iou = 0.0;
            for &g in &gt_order {
                if taken[g] {
                    continue;
                }
                if let Some(bg) = best_g {
                    if !gt_ignored[bg] && gt_ignored[g] {
                        break;
                    }
                }
                let v = iou(det.mask(), gt_items[g].mask());
                if v < thr {
                    continue;
                }
                if best_g.is_none() || v > best_iou {
                    best_g = Some(g);
                    best_iou = v;
                }
            }
            match best_g {
                Some(g) => {
                    taken[g] = true;
                    entries.push((det.score(), !gt_ignored[g], gt_ignored[g]));
                }
                None => {
                    entries.push((det.score(), false, !in_band(det.area(), band)));
                }
            }
        }
    }

    if num_gt == 0 {
        return -1.0;
    }

    // Global stable descending sort by score.
    let mut order: Vec<usize> = Vec::with_capacity(entries.len());
    for i in 0..entries.len() {
        let mut pos = order.len();
        while pos > 0 && entries[order[pos - 1]].0 < entries[i].0 {
            pos -= 1;
        }
        order.insert(pos, i);
    }

    let mut recall = Vec::new();
    let mut precision = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    for &i in &order {
        let (_, is_tp, ignored) = entries[i];
        if ignored {
            continue;
        }
        if is_tp {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / num_gt as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    let n = precision.len();
    for i in (0..n.saturating_sub(1)).rev() {
        if precision[i] < precision[i + 1] {
            precision[i] = precision[i + 1];
        }
    }

    let mut total = 0.0;
    for j in 0..101 {
        let r = j as f64 / 100.0;
        let mut sample = 0.0;
        for i in 0..n {
            if recall[i] >= r {
                sample = precision[i];
                break;
            }
        }
        total += sample;
    }
    total / 101.0
}

pub fn ref_coco_map(
    dets: &[PerImage<Detection>],
    gts: &[PerImage<InstanceAnnotation>],
    max_dets: usize,
) -> RefResult {
    const ALL: (f64, f64) = (0.0, f64::INFINITY);
    const SMALL: (f64, f64) = (0.0, 1024.0);
    const MEDIUM: (f64, f64) = (1024.0, 9216.0);
    const LARGE: (f64, f64) = (9216.0, f64::INFINITY);

    let mut categories: Vec<u32> = Vec::new();
    for image in gts {
        for item in &image.items {
            if !categories.contains(&item.category_id()) {
                categories.push(item.category_id());
            }
        }
    }
    for image in dets {
        for item in &image.items {
            if !categories.contains(&item.category_id()) {
                categories.push(item.category_id());
            }
        }
    }
    categories.sort_unstable();

    let thresholds: Vec<f64> = (0..10).map(|i| 0.5 + 0.05 * i as f64).collect();
    let band_mean = |cat: u32, band: (f64, f64)| -> f64 {
        let mut acc = 0.0;
        for &thr in &thresholds {
            let ap = slice_ap(dets, gts, cat, thr, band, max_dets);
            if ap < 0.0 {
                return -1.0;
            }
            acc += ap;
        }
        acc / thresholds.len() as f64
    };

    let mut per_category = BTreeMap::new();
    for &cat in &categories {
        per_category.insert(
            cat,
            RefSummary {
                map: band_mean(cat, ALL),
                ap50: slice_ap(dets, gts, cat, 0.5, ALL, max_dets),
                ap75: slice_ap(dets, gts, cat, 0.75, ALL, max_dets),
                ap_s: band_mean(cat, SMALL),
                ap_m: band_mean(cat, MEDIUM),
                ap_l: band_mean(cat, LARGE),
            },
        );
    }

    let field_mean = |pick: fn(&RefSummary) -> f64| -> f64 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for summary in per_category.values() {
            let v = pick(summary);
            if v >= 0.0 {
                acc += v;
                count += 1;
            }
        }
        if count == 0 {
            -1.0
        } else {
            acc / count as f64
        }
    };

    RefResult {
        overall: RefSummary {
            map: field_mean(|s| s.map),
            ap50: field_mean(|s| s.ap50),
            ap75: field_mean(|s| s.ap75),
            ap_s: field_mean(|s| s.ap_s),
            ap_m: field_mean(|s| s.ap_m),
            ap_l: field_mean(|s| s.ap_l),
        },
        per_category,
    }
}
