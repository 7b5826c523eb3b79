//! Frequency-domain mixture evaluation.
//!
//! Zero-padded linear convolution: each dimension is padded to the next
//! power of two at or above `dim + 2 * ceil(4 lambda)`, which guarantees the
//! circular product equals the truncated linear convolution. The kernel is
//! sampled at integer offsets with full width `2 * ceil(4 lambda) + 1`.

use rustfft::num_complex::Complex;
use rustfft::FftDirection;

use super::{default_truncation_radius, heatmap_from_grid, validate_lambda, Heatmap};
use crate::error::{Error, Result};
use crate::fft_util::{fft_2d, next_pow2};
use crate::grid::{Grid, LuminanceGrid};

/// Default ceiling on padded transform size (complex elements).
pub const DEFAULT_FFT_BUDGET: usize = 1 << 25;

/// Evaluate the mixture via FFT with the default memory budget.
pub fn pgm_fft(input: &LuminanceGrid, lambda: f64) -> Result<Heatmap> {
    pgm_fft_with_budget(input, lambda, DEFAULT_FFT_BUDGET)
}

/// Evaluate the mixture via FFT, refusing padded transforms larger than
/// `max_padded_elems` complex elements.
pub fn pgm_fft_with_budget(
    input: &LuminanceGrid,
    lambda: f64,
    max_padded_elems: usize,
) -> Result<Heatmap> {
    validate_lambda(lambda)?;
    let width = input.width();
    let height = input.height();
    let radius = default_truncation_radius(lambda);
    let padded_w = next_pow2(width + 2 * radius);
    let padded_h = next_pow2(height + 2 * radius);
    let padded = padded_w
        .checked_mul(padded_h)
        .ok_or_else(|| Error::resource("padded transform size overflows"))?;
    if padded > max_padded_elems {
        return Err(Error::resource(format!(
            "padded transform {padded_w}x{padded_h} exceeds budget of {max_padded_elems} elements"
        )));
    }

    // Image, zero-padded.
    let mut img = vec![Complex::new(0.0, 0.0); padded];
    for y in 0..height {
        for x in 0..width {
            img[y * padded_w + x].re = input.at(x, y);
        }
    }

    // Kernel centered at the origin with negative offsets wrapped.
    let taps: Vec<f64> = (0..=radius)
        .map(|d| {
            let d = d as f64;
            (-d * d / (2.0 * lambda * lambda)).exp()
        })
        .collect();
    let mut ker = vec![Complex::new(0.0, 0.0); padded];
    for dy in -(radius as isize)..=(radius as isize) {
        let wy = taps[dy.unsigned_abs()];
        let row = dy.rem_euclid(padded_h as isize) as usize;
        for dx in -(radius as isize)..=(radius as isize) {
            let col = dx.rem_euclid(padded_w as isize) as usize;
            ker[row * padded_w + col].re = wy * taps[dx.unsigned_abs()];
        }
    }

    fft_2d(&mut img, padded_w, padded_h, FftDirection::Forward);
    fft_2d(&mut ker, padded_w, padded_h, FftDirection::Forward);
    for (a, b) in img.iter_mut().zip(&ker) {
        *a *= b;
    }
    fft_2d(&mut img, padded_w, padded_h, FftDirection::Inverse);

    let scale = 1.0 / padded as f64;
    let mut out = vec![0.0f64; width * height];
    for y in 0..height {
        for x in 0..width {
            // Roundoff can leave values microscopically negative; clamp so
            // heatmaps stay non-negative.
            out[y * width + x] = (img[y * padded_w + x].re * scale).max(0.0);
        }
    }
    Ok(heatmap_from_grid(Grid::new(width, height, out)?, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::{pgm_exact, pgm_separable, Truncation};

    fn sup_rel_err(a: &[f64], reference: &[f64]) -> f64 {
        let scale = reference
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        a.iter()
            .zip(reference)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    }

    #[test]
    fn impulse_peak_is_one() {
        let mut values = vec![0.0; 64];
        values[3 * 8 + 3] = 1.0;
        let g = LuminanceGrid::new(8, 8, values).unwrap();
        let h = pgm_fft(&g, 1.0).unwrap();
        assert!((h.grid().at(3, 3) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn zero_grid_stays_below_noise_floor() {
        let g = LuminanceGrid::new(8, 8, vec![0.0; 64]).unwrap();
        let h = pgm_fft(&g, 1.0).unwrap();
        assert!(h.values().iter().all(|&v| v.abs() < 1e-9));
    }

    #[test]
    fn matches_exact_on_random_grid() {
        let values: Vec<f64> = (0..256)
            .map(|i| ((i * 2654435761u64 as usize) % 1000) as f64 / 999.0)
            .collect();
        let g = LuminanceGrid::new(16, 16, values).unwrap();
        let exact = pgm_exact(&g, 2.0).unwrap();
        let fft = pgm_fft(&g, 2.0).unwrap();
        assert!(sup_rel_err(fft.values(), exact.values()) < 1e-4);
    }

    #[test]
    fn matches_separable_at_same_truncation() {
        let values: Vec<f64> = (0..15 * 9)
            .map(|i| ((i * 40503) % 997) as f64 / 996.0)
            .collect();
        let g = LuminanceGrid::new(15, 9, values).unwrap();
        let radius = default_truncation_radius(1.7);
        let sep = pgm_separable(&g, 1.7, Truncation::Radius(radius)).unwrap();
        let fft = pgm_fft(&g, 1.7).unwrap();
        assert!(sup_rel_err(fft.values(), sep.values()) < 1e-10);
    }

    #[test]
    fn budget_refusal() {
        let g = LuminanceGrid::new(64, 64, vec![0.5; 4096]).unwrap();
        assert!(matches!(
            pgm_fft_with_budget(&g, 4.0, 1024),
            Err(crate::error::Error::Resource(_))
        ));
    }
}
