//! Compute all five training-loss terms for a noisy prediction against a
//! ground-truth mask.
//!
//! Usage: cargo run --example loss_breakdown

use pgmix::losses::{
    bce_pixel, bce_scalar, cross_entropy, dice_loss, gh_loss, total_loss, LossTerms, LossWeights,
};
use pgmix::pgm::{downsample_heatmap, multiscale_stack, ComputePath, Normalization};
use pgmix::{BinaryMask, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (width, height) = (32, 32);
    let mut bits = vec![false; width * height];
    for y in 8..24 {
        for x in 10..26 {
            bits[y * width + x] = true;
        }
    }
    let gt = BinaryMask::new(width, height, bits)?;

    // A blurry prediction: high probability inside, small leakage outside.
    let pred = Grid::new(
        width,
        height,
        gt.bits()
            .iter()
            .map(|&b| if b { 0.9 } else { 0.05 })
            .collect(),
    )?;

    // Heatmap targets at two scales with matching predicted maps.
    let target = multiscale_stack(
        &gt.to_luminance(),
        &[2.0, 8.0],
        ComputePath::Separable,
        Normalization::MaxOne,
    )?;
    let strides = [1usize, 2usize];
    let gh_preds: Vec<Grid> = target
        .maps()
        .iter()
        .zip(&strides)
        .map(|(map, &s)| {
            let down = downsample_heatmap(map, s).unwrap();
            // Slightly damped intermediate features.
            Grid::new(
                down.width(),
                down.height(),
                down.values().iter().map(|v| v * 0.95).collect(),
            )
            .unwrap()
        })
        .collect();

    let parts = LossTerms {
        cls: cross_entropy(&[2.0, 0.3, -1.0], 0)?,
        obj: bce_scalar(0.85, true)?,
        mask: bce_pixel(&pred, &gt)?,
        dice: dice_loss(&pred, &gt)?,
        gh: gh_loss(&gh_preds, &target, &strides)?,
    };
    let breakdown = total_loss(&parts, &LossWeights::default())?;
    println!("{}", serde_json::to_string_pretty(&breakdown)?);
    Ok(())
}
