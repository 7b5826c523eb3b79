//! Brute-force mixture evaluation. O((HW)^2); the reference oracle for the
//! separable and FFT paths.

use super::{heatmap_from_grid, validate_lambda, Heatmap};
use crate::error::Result;
use crate::grid::{Grid, LuminanceGrid};

/// Evaluate the mixture by summing every pixel's Gaussian at every output
/// pixel. Distances are Euclidean between integer pixel centers; zero
/// intensities contribute nothing.
pub fn pgm_exact(input: &LuminanceGrid, lambda: f64) -> Result<Heatmap> {
    validate_lambda(lambda)?;
    let width = input.width();
    let height = input.height();
    let inv = 1.0 / (2.0 * lambda * lambda);
    let src = input.values();

    let mut out = vec![0.0f64; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for v in 0..height {
                let dy = y as f64 - v as f64;
                let dy2 = dy * dy;
                let row = &src[v * width..(v + 1) * width];
                for (u, &intensity) in row.iter().enumerate() {
                    if intensity == 0.0 {
                        continue;
                    }
                    let dx = x as f64 - u as f64;
                    acc += intensity * (-(dx * dx + dy2) * inv).exp();
                }
            }
            out[y * width + x] = acc;
        }
    }
    Ok(heatmap_from_grid(Grid::new(width, height, out)?, lambda))
}
