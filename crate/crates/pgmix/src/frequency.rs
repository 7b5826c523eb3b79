//! Frequency-domain boundary gain.
//!
//! A feature grid is transformed to the frequency domain, reweighted by a
//! Butterworth-style radial high-pass, and transformed back into a spatial
//! gain map that highlights edge and texture content. The gain is applied
//! residually: `out = f + alpha * (gain ⊙ f)`, so low-frequency content and
//! the signs/zeros of the input are preserved.

use rustfft::num_complex::Complex;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fft_util::fft_2d;
use crate::grid::Grid;

/// Complex spectrum of a 2D grid, row-major over frequency bins. For real
/// inputs, conjugate symmetry `S(-k) == conj(S(k))` holds (indices mod grid
/// size).
#[derive(Debug, Clone)]
pub struct SpectrumGrid {
    width: usize,
    height: usize,
    values: Vec<Complex<f64>>,
}

impl SpectrumGrid {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex<f64>] {
        &self.values
    }

    #[inline]
    pub fn at(&self, kx: usize, ky: usize) -> Complex<f64> {
        self.values[ky * self.width + kx]
    }
}

/// High-pass filter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanConfig {
    rho0: f64,
    sharpness: f64,
    alpha: f64,
}

impl FanConfig {
    pub fn new(rho0: f64, sharpness: f64, alpha: f64) -> Result<Self> {
        if !rho0.is_finite() || rho0 <= 0.0 || rho0 > 0.5 {
            return Err(Error::domain(format!(
                "cutoff rho0 {rho0} must lie in (0, 0.5]"
            )));
        }
        if !sharpness.is_finite() || sharpness <= 0.0 {
            return Err(Error::domain(format!("sharpness {sharpness} must be > 0")));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::domain(format!("alpha {alpha} must be >= 0")));
        }
        Ok(Self {
            rho0,
            sharpness,
            alpha,
        })
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for FanConfig {
    fn default() -> Self {
        Self {
            rho0: 0.25,
            sharpness: 2.0,
            alpha: 1.0,
        }
    }
}

/// Forward 2D DFT, unnormalized: the DC bin equals the sum of all samples.
pub fn dft2(grid: &Grid) -> SpectrumGrid {
    let mut buf: Vec<Complex<f64>> = grid
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fft_2d(&mut buf, grid.width(), grid.height(), FftDirection::Forward);
    SpectrumGrid {
        width: grid.width(),
        height: grid.height(),
        values: buf,
    }
}

/// Inverse 2D DFT scaled by 1/(HW), returning the real part. Exact inverse
/// of [`dft2`] for spectra of real grids.
pub fn idft2(spectrum: &SpectrumGrid) -> Grid {
    let mut buf = spectrum.values.clone();
    fft_2d(
        &mut buf,
        spectrum.width,
        spectrum.height,
        FftDirection::Inverse,
    );
    let scale = 1.0 / (spectrum.width * spectrum.height) as f64;
    let values = buf.iter().map(|c| c.re * scale).collect();
    Grid::new(spectrum.width, spectrum.height, values).expect("spectrum dims are positive")
}

/// Normalized signed frequency of bin `k` on an axis of length `n`,
/// in (-0.5, 0.5].
fn signed_freq(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        k as f64 / n as f64
    } else {
        (k as f64 - n as f64) / n as f64
    }
}

/// Butterworth-style radial high-pass over frequency bins:
/// `w(k) = 1 / (1 + (rho0 / rho(k))^(2s))`, exactly 0 at DC, 0.5 at the
/// cutoff, and monotonically non-decreasing in the radial frequency
/// `rho(k) in [0, ~0.707]`.
pub fn highpass_weight(width: usize, height: usize, cfg: &FanConfig) -> Grid {
    let mut values = Vec::with_capacity(width * height);
    let exponent = 2.0 * cfg.sharpness;
    for ky in 0..height {
        let fy = signed_freq(ky, height);
        for kx in 0..width {
            let fx = signed_freq(kx, width);
            let rho = (fx * fx + fy * fy).sqrt();
            let w = if rho == 0.0 {
                0.0
            } else {
                1.0 / (1.0 + (cfg.rho0 / rho).powf(exponent))
            };
            values.push(w);
        }
    }
    Grid::new(width, height, values).expect("dimensions validated by caller")
}

/// Spatial gain map: high-pass the spectrum, transform back, and rescale by
/// the maximum absolute value into [-1, 1]. Responses below 1e-12 of the
/// input magnitude are treated as zero so constant inputs map to the exact
/// zero grid instead of amplified roundoff noise.
pub fn fan_gain(f: &Grid, cfg: &FanConfig) -> Result<Grid> {
    if !f.all_finite() {
        return Err(Error::domain("gain input contains non-finite values"));
    }
    let mut spectrum = dft2(f);
    let weight = highpass_weight(f.width(), f.height(), cfg);
    for (c, &w) in spectrum.values.iter_mut().zip(weight.values()) {
        *c *= w;
    }
    let mut gain = idft2(&spectrum);
    let max_abs = gain.max_abs();
    if max_abs <= 1e-12 * f.max_abs().max(1.0) {
        return Grid::zeros(f.width(), f.height());
    }
    for v in gain.values_mut() {
        *v /= max_abs;
    }
    Ok(gain)
}

/// Residual application: `out = f + alpha * (gain ⊙ f)` elementwise.
pub fn fan_apply(f: &Grid, gain: &Grid, alpha: f64) -> Result<Grid> {
    if !f.same_shape(gain) {
        return Err(Error::domain(format!(
            "shape mismatch: {}x{} vs {}x{}",
            f.width(),
            f.height(),
            gain.width(),
            gain.height()
        )));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::domain(format!(
            "alpha {alpha} must be finite and >= 0"
        )));
    }
    let values = f
        .values()
        .iter()
        .zip(gain.values())
        .map(|(&v, &g)| v + alpha * g * v)
        .collect();
    Grid::new(f.width(), f.height(), values)
}
