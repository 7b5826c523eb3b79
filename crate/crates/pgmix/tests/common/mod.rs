//! Shared fixtures and independent oracles for the integration suites.

#![allow(dead_code)]

pub mod ref_eval;

use pgmix::io::{Detection, InstanceAnnotation, PerImage};
use pgmix::{BinaryMask, Grid, LuminanceGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sup-norm deviation relative to the reference's maximum magnitude. This is
/// the "relative error" used by all cross-path comparisons; it absorbs
/// accumulation-order noise without blowing up on near-zero pixels.
pub fn sup_rel_err(values: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(values.len(), reference.len());
    let scale = reference
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    values
        .iter()
        .zip(reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

pub fn random_grid(rng: &mut ChaCha8Rng, width: usize, height: usize) -> LuminanceGrid {
    let values: Vec<f64> = (0..width * height).map(|_| rng.random::<f64>()).collect();
    LuminanceGrid::new(width, height, values).unwrap()
}

pub fn random_real_grid(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Grid {
    let values: Vec<f64> = (0..width * height)
        .map(|_| rng.random::<f64>() * 2.0 - 1.0)
        .collect();
    Grid::new(width, height, values).unwrap()
}

pub fn rect_mask(
    width: usize,
    height: usize,
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
) -> BinaryMask {
    let mut bits = vec![false; width * height];
    for y in y0..(y0 + h).min(height) {
        for x in x0..(x0 + w).min(width) {
            bits[y * width + x] = true;
        }
    }
    BinaryMask::new(width, height, bits).unwrap()
}

/// Union of 1-3 random rectangles covering less than half the frame.
pub fn random_blob_mask(rng: &mut ChaCha8Rng, width: usize, height: usize) -> BinaryMask {
    loop {
        let mut bits = vec![false; width * height];
        for _ in 0..rng.random_range(1..=3usize) {
            let w = rng.random_range(2..=width / 3);
            let h = rng.random_range(2..=height / 3);
            let x0 = rng.random_range(0..width - w);
            let y0 = rng.random_range(0..height - h);
            for y in y0..y0 + h {
                for x in x0..x0 + w {
                    bits[y * width + x] = true;
                }
            }
        }
        let area = bits.iter().filter(|&&b| b).count();
        if area > 0 && area * 2 < width * height {
            return BinaryMask::new(width, height, bits).unwrap();
        }
    }
}

/// Direct O(N^2) 2D DFT, written independently of the crate's transform.
/// Forward, unnormalized; returns (re, im) per bin.
pub fn naive_dft2(values: &[f64], width: usize, height: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); width * height];
    for ky in 0..height {
        for kx in 0..width {
            let mut re = 0.0;
            let mut im = 0.0;
            for y in 0..height {
                for x in 0..width {
                    let angle = -2.0
                        * std::f64::consts::PI
                        * (kx as f64 * x as f64 / width as f64
                            + ky as f64 * y as f64 / height as f64);
                    let v = values[y * width + x];
                    re += v * angle.cos();
                    im += v * angle.sin();
                }
            }
            out[ky * width + kx] = (re, im);
        }
    }
    out
}

/// Direct inverse DFT (real part), scaled by 1/(HW).
pub fn naive_idft2_real(spectrum: &[(f64, f64)], width: usize, height: usize) -> Vec<f64> {
    let mut out = vec![0.0; width * height];
    let n = (width * height) as f64;
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for ky in 0..height {
                for kx in 0..width {
                    let angle = 2.0
                        * std::f64::consts::PI
                        * (kx as f64 * x as f64 / width as f64
                            + ky as f64 * y as f64 / height as f64);
                    let (re, im) = spectrum[ky * width + kx];
                    acc += re * angle.cos() - im * angle.sin();
                }
            }
            out[y * width + x] = acc / n;
        }
    }
    out
}

/// Independent realization of the boundary-gain pipeline on naive DFTs:
/// radial Butterworth high-pass, inverse transform, max-abs rescale.
pub fn naive_fan_gain(values: &[f64], width: usize, height: usize, rho0: f64, s: f64) -> Vec<f64> {
    let mut spectrum = naive_dft2(values, width, height);
    for ky in 0..height {
        let fy = if 2 * ky <= height {
            ky as f64 / height as f64
        } else {
            (ky as f64 - height as f64) / height as f64
        };
        for kx in 0..width {
            let fx = if 2 * kx <= width {
                kx as f64 / width as f64
            } else {
                (kx as f64 - width as f64) / width as f64
            };
            let rho = (fx * fx + fy * fy).sqrt();
            let w = if rho == 0.0 {
                0.0
            } else {
                1.0 / (1.0 + (rho0 / rho).powf(2.0 * s))
            };
            let bin = &mut spectrum[ky * width + kx];
            bin.0 *= w;
            bin.1 *= w;
        }
    }
    let mut gain = naive_idft2_real(&spectrum, width, height);
    let input_scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let max_abs = gain.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs <= 1e-12 * input_scale {
        return vec![0.0; width * height];
    }
    for v in &mut gain {
        *v /= max_abs;
    }
    gain
}

/// Randomized instance scene on a small grid: ground truth plus perturbed
/// and spurious detections, occasionally with tied scores or empty masks.
pub fn random_scene(
    seed: u64,
    grid: usize,
    max_instances: usize,
    num_categories: u32,
) -> (Vec<PerImage<Detection>>, Vec<PerImage<InstanceAnnotation>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_images = rng.random_range(1..=2usize);
    let mut det_images = Vec::new();
    let mut gt_images = Vec::new();
    let mut remaining = rng.random_range(1..=max_instances);

    for image_id in 0..num_images as u64 {
        let n_gt = if image_id + 1 == num_images as u64 {
            remaining
        } else {
            rng.random_range(0..=remaining)
        };
        remaining -= n_gt;

        let mut gts = Vec::new();
        let mut dets = Vec::new();
        for _ in 0..n_gt {
            let category = rng.random_range(0..num_categories);
            let mask = if rng.random_range(0..10) == 0 {
                BinaryMask::filled(grid, grid, false).unwrap()
            } else {
                let w = rng.random_range(2..=grid / 2);
                let h = rng.random_range(2..=grid / 2);
                let x0 = rng.random_range(0..grid - w + 1);
                let y0 = rng.random_range(0..grid - h + 1);
                rect_mask(grid, grid, x0, y0, w, h)
            };
            // Perturbed copy as a detection, most of the time.
            if rng.random_range(0..10) < 8 {
                let bbox = mask.tight_bbox();
                let shift =
                    |v: usize, d: i64, max: usize| (v as i64 + d).clamp(0, max as i64) as usize;
                let dx = rng.random_range(-1..=1i64);
                let dy = rng.random_range(-1..=1i64);
                let det_mask = if mask.is_empty() {
                    BinaryMask::filled(grid, grid, false).unwrap()
                } else {
                    rect_mask(
                        grid,
                        grid,
                        shift(bbox.x_min, dx, grid - 1),
                        shift(bbox.y_min, dy, grid - 1),
                        bbox.width.max(1),
                        bbox.height.max(1),
                    )
                };
                let det_cat = if rng.random_range(0..20) < 17 {
                    category
                } else {
                    rng.random_range(0..num_categories)
                };
                dets.push(Detection::new(det_cat, rng.random::<f64>(), det_mask).unwrap());
            }
            gts.push(InstanceAnnotation::new(category, mask));
        }
        // Spurious detections.
        for _ in 0..rng.random_range(0..=2usize) {
            let w = rng.random_range(1..=grid / 2);
            let h = rng.random_range(1..=grid / 2);
            let x0 = rng.random_range(0..grid - w + 1);
            let y0 = rng.random_range(0..grid - h + 1);
            dets.push(
                Detection::new(
                    rng.random_range(0..num_categories),
                    rng.random::<f64>(),
                    rect_mask(grid, grid, x0, y0, w, h),
                )
                .unwrap(),
            );
        }
        // Exercise the deterministic tie-break now and then.
        if dets.len() >= 2 && rng.random_range(0..3) == 0 {
            let tied = dets[0].score();
            let clone = &dets[1];
            dets[1] = Detection::new(clone.category_id(), tied, clone.mask().clone()).unwrap();
        }
        det_images.push(PerImage {
            image_id,
            items: dets,
        });
        gt_images.push(PerImage {
            image_id,
            items: gts,
        });
    }
    (det_images, gt_images)
}
