//! Training-objective terms and their weighted combination.
//!
//! Five terms: softmax cross-entropy for category prediction, scalar BCE for
//! objectness, pixel BCE and soft Dice for mask quality, and a multi-scale
//! MSE between predicted maps and downsampled heatmap targets. The total is
//! the non-negative linear combination under [`LossWeights`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Grid};
use crate::pgm::{downsample_heatmap, HeatmapStack, Normalization};

/// Probabilities are clamped into `[CLAMP, 1 - CLAMP]` before logs so
/// saturated predictions keep every loss finite.
pub const PROB_CLAMP: f64 = 1e-7;

const DICE_EPS: f64 = 1e-6;

/// Per-term coefficients; all default to 0.2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub cls: f64,
    pub obj: f64,
    pub mask: f64,
    pub dice: f64,
    pub gh: f64,
}

impl LossWeights {
    pub fn new(cls: f64, obj: f64, mask: f64, dice: f64, gh: f64) -> Result<Self> {
        for (name, w) in [
            ("cls", cls),
            ("obj", obj),
            ("mask", mask),
            ("dice", dice),
            ("gh", gh),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::domain(format!(
                    "weight {name} = {w} must be finite and >= 0"
                )));
            }
        }
        Ok(Self {
            cls,
            obj,
            mask,
            dice,
            gh,
        })
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            cls: 0.2,
            obj: 0.2,
            mask: 0.2,
            dice: 0.2,
            gh: 0.2,
        }
    }
}

/// Unweighted values of the five terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossTerms {
    pub cls: f64,
    pub obj: f64,
    pub mask: f64,
    pub dice: f64,
    pub gh: f64,
}

/// Per-term values plus their weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub cls: f64,
    pub obj: f64,
    pub mask: f64,
    pub dice: f64,
    pub gh: f64,
    pub total: f64,
}

fn validate_probability_grid(pred: &Grid) -> Result<()> {
    for (i, v) in pred.values().iter().enumerate() {
        if !v.is_finite() || *v < 0.0 || *v > 1.0 {
            return Err(Error::domain(format!(
                "prediction {v} at index {i} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

fn check_shapes(pred: &Grid, gt: &BinaryMask) -> Result<()> {
    if pred.width() != gt.width() || pred.height() != gt.height() {
        return Err(Error::domain(format!(
            "shape mismatch: prediction {}x{} vs mask {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    Ok(())
}

fn bce_term(p: f64, y: bool) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    if y {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Mean binary cross-entropy over pixels.
pub fn bce_pixel(pred: &Grid, gt: &BinaryMask) -> Result<f64> {
    check_shapes(pred, gt)?;
    validate_probability_grid(pred)?;
    let sum: f64 = pred
        .values()
        .iter()
        .zip(gt.bits())
        .map(|(&p, &y)| bce_term(p, y))
        .sum();
    Ok(sum / pred.values().len() as f64)
}

/// Binary cross-entropy of a single objectness score.
pub fn bce_scalar(pred_score: f64, gt_label: bool) -> Result<f64> {
    if !pred_score.is_finite() {
        return Err(Error::domain(format!("score {pred_score} must be finite")));
    }
    Ok(bce_term(pred_score, gt_label))
}

/// Softmax cross-entropy, computed with max-subtraction for stability.
pub fn cross_entropy(logits: &[f64], label: usize) -> Result<f64> {
    if label >= logits.len() {
        return Err(Error::domain(format!(
            "label {label} out of range for {} logits",
            logits.len()
        )));
    }
    if logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::domain("logits must be finite"));
    }
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &l| m.max(l));
    let log_sum_exp = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
    Ok(log_sum_exp - logits[label])
}

/// Soft Dice loss `1 - (2 sum(p y) + eps) / (sum(p) + sum(y) + eps)`,
/// in [0, 1].
pub fn dice_loss(pred: &Grid, gt: &BinaryMask) -> Result<f64> {
    check_shapes(pred, gt)?;
    validate_probability_grid(pred)?;
    let mut intersection = 0.0;
    let mut pred_sum = 0.0;
    let mut gt_sum = 0.0;
    for (&p, &y) in pred.values().iter().zip(gt.bits()) {
        pred_sum += p;
        if y {
            intersection += p;
            gt_sum += 1.0;
        }
    }
    Ok(1.0 - (2.0 * intersection + DICE_EPS) / (pred_sum + gt_sum + DICE_EPS))
}

/// Multi-scale heatmap regression: the mean over scales of the MSE between
/// each predicted map and the correspondingly downsampled target. Targets
/// must be max-one normalized.
pub fn gh_loss(pred_maps: &[Grid], target: &HeatmapStack, strides: &[usize]) -> Result<f64> {
    if pred_maps.len() != target.len() || strides.len() != target.len() {
        return Err(Error::domain(format!(
            "expected {} prediction maps and strides, got {} and {}",
            target.len(),
            pred_maps.len(),
            strides.len()
        )));
    }
    if target.maps()[0].normalization() != Normalization::MaxOne {
        return Err(Error::domain("heatmap targets must be max-one normalized"));
    }
    let mut total = 0.0;
    for ((pred, map), &stride) in pred_maps.iter().zip(target.maps()).zip(strides) {
        let down = downsample_heatmap(map, stride)?;
        if !pred.same_shape(down.grid()) {
            return Err(Error::domain(format!(
                "prediction {}x{} does not match downsampled target {}x{}",
                pred.width(),
                pred.height(),
                down.width(),
                down.height()
            )));
        }
        let mse: f64 = pred
            .values()
            .iter()
            .zip(down.values())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>()
            / pred.values().len() as f64;
        total += mse;
    }
    Ok(total / target.len() as f64)
}

/// Combine the five terms under `weights`.
pub fn total_loss(parts: &LossTerms, weights: &LossWeights) -> Result<LossBreakdown> {
    for (name, v) in [
        ("cls", parts.cls),
        ("obj", parts.obj),
        ("mask", parts.mask),
        ("dice", parts.dice),
        ("gh", parts.gh),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::domain(format!(
                "loss term {name} = {v} must be finite and >= 0"
            )));
        }
    }
    let total = weights.cls * parts.cls
        + weights.obj * parts.obj
        + weights.mask * parts.mask
        + weights.dice * parts.dice
        + weights.gh * parts.gh;
    Ok(LossBreakdown {
        cls: parts.cls,
        obj: parts.obj,
        mask: parts.mask,
        dice: parts.dice,
        gh: parts.gh,
        total,
    })
}
