//! Photometric Gaussian mixture heatmaps.
//!
//! The mixture places one isotropic Gaussian of standard deviation `lambda`
//! at every pixel center, with amplitude equal to the pixel's intensity, and
//! sums them over the whole grid:
//!
//! ```text
//! G(I; lambda)(x) = sum over pixels u of I(u) * exp(-|x - u|^2 / (2 lambda^2))
//! ```
//!
//! Three interchangeable evaluation paths are provided. [`pgm_exact`] is the
//! quadratic-cost reference that every fast path is tested against;
//! [`pgm_separable`] factorizes the kernel per axis; [`pgm_fft`] runs a
//! zero-padded linear convolution in the frequency domain.

mod exact;
mod fft;
mod separable;

pub use exact::pgm_exact;
pub use fft::{pgm_fft, pgm_fft_with_budget, DEFAULT_FFT_BUDGET};
pub use separable::{pgm_separable, Truncation};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, LuminanceGrid};

/// Scales rendered in the reference multi-scale stack.
pub const DEFAULT_LAMBDAS: [f64; 4] = [1.0, 5.0, 10.0, 20.0];

/// Parameters of a single 2D Gaussian component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    amplitude: f64,
    center: (f64, f64),
    sigma_x: f64,
    sigma_y: f64,
}

impl GaussianParams {
    pub fn new(amplitude: f64, center: (f64, f64), sigma_x: f64, sigma_y: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::domain(format!(
                "amplitude {amplitude} must be finite and >= 0"
            )));
        }
        if !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::domain("gaussian center must be finite"));
        }
        if !sigma_x.is_finite() || sigma_x <= 0.0 || !sigma_y.is_finite() || sigma_y <= 0.0 {
            return Err(Error::domain(format!(
                "sigmas ({sigma_x}, {sigma_y}) must be finite and > 0"
            )));
        }
        Ok(Self {
            amplitude,
            center,
            sigma_x,
            sigma_y,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn center(&self) -> (f64, f64) {
        self.center
    }

    pub fn sigmas(&self) -> (f64, f64) {
        (self.sigma_x, self.sigma_y)
    }
}

/// Evaluate one Gaussian component at `(x, y)`. The result lies in
/// `[0, amplitude]`.
pub fn gaussian2d(x: f64, y: f64, p: &GaussianParams) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::domain(format!(
            "evaluation point ({x}, {y}) must be finite"
        )));
    }
    let dx = x - p.center.0;
    let dy = y - p.center.1;
    let exponent =
        -dx * dx / (2.0 * p.sigma_x * p.sigma_x) - dy * dy / (2.0 * p.sigma_y * p.sigma_y);
    Ok(p.amplitude * exponent.exp())
}

/// Value scaling of a heatmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Mixture values as computed; overlapping components may exceed 1.
    Raw,
    /// Divided by the maximum value (zero maps stay zero).
    MaxOne,
}

/// Mixture evaluation path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputePath {
    Exact,
    Separable,
    Fft,
}

/// One mixture response map at a single `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    grid: Grid,
    lambda: f64,
    normalization: Normalization,
}

impl Heatmap {
    /// Wrap a computed grid. Values must be finite and non-negative.
    pub fn new(grid: Grid, lambda: f64, normalization: Normalization) -> Result<Self> {
        validate_lambda(lambda)?;
        for (i, v) in grid.values().iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::domain(format!(
                    "heatmap value {v} at index {i} must be finite and >= 0"
                )));
            }
        }
        Ok(Self {
            grid,
            lambda,
            normalization,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn values(&self) -> &[f64] {
        self.grid.values()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// One heatmap per `lambda`, all with the same shape and normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStack {
    maps: Vec<Heatmap>,
}

impl HeatmapStack {
    pub fn new(maps: Vec<Heatmap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::domain("heatmap stack must not be empty"));
        }
        for pair in maps.windows(2) {
            if pair[1].lambda() <= pair[0].lambda() {
                return Err(Error::domain("stack lambdas must be strictly increasing"));
            }
            if !pair[0].grid().same_shape(pair[1].grid())
                || pair[0].normalization() != pair[1].normalization()
            {
                return Err(Error::domain(
                    "stack maps must share shape and normalization",
                ));
            }
        }
        Ok(Self { maps })
    }

    pub fn maps(&self) -> &[Heatmap] {
        &self.maps
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.lambda()).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

pub(crate) fn validate_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::domain(format!(
            "lambda {lambda} must be finite and > 0"
        )));
    }
    Ok(())
}

/// Truncation radius covering all kernel mass above exp(-8) per component.
pub fn default_truncation_radius(lambda: f64) -> usize {
    (4.0 * lambda).ceil() as usize
}

/// Rescale a heatmap. `Raw` keeps values as-is; `MaxOne` divides by the
/// maximum so a non-zero map peaks at exactly 1.
pub fn normalize_heatmap(h: &Heatmap, mode: Normalization) -> Heatmap {
    match mode {
        Normalization::Raw => Heatmap {
            grid: h.grid.clone(),
            lambda: h.lambda,
            normalization: Normalization::Raw,
        },
        Normalization::MaxOne => {
            let max = h.grid.values().iter().fold(0.0f64, |m, v| m.max(*v));
            let mut grid = h.grid.clone();
            if max > 0.0 {
                for v in grid.values_mut() {
                    *v /= max;
                }
            }
            Heatmap {
                grid,
                lambda: h.lambda,
                normalization: Normalization::MaxOne,
            }
        }
    }
}

fn compute_path(input: &LuminanceGrid, lambda: f64, path: ComputePath) -> Result<Heatmap> {
    match path {
        ComputePath::Exact => pgm_exact(input, lambda),
        ComputePath::Separable => pgm_separable(
            input,
            lambda,
            Truncation::Radius(default_truncation_radius(lambda)),
        ),
        ComputePath::Fft => pgm_fft(input, lambda),
    }
}

/// Compute one heatmap per `lambda` with the chosen path and normalization.
/// Per-scale maps are evaluated concurrently.
pub fn multiscale_stack(
    input: &LuminanceGrid,
    lambdas: &[f64],
    path: ComputePath,
    normalization: Normalization,
) -> Result<HeatmapStack> {
    if lambdas.is_empty() {
        return Err(Error::domain("lambda list must not be empty"));
    }
    for lambda in lambdas {
        validate_lambda(*lambda)?;
    }
    for pair in lambdas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::domain(format!(
                "lambdas must be strictly increasing, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    let maps = lambdas
        .par_iter()
        .map(|&lambda| {
            let raw = compute_path(input, lambda, path)?;
            Ok(normalize_heatmap(&raw, normalization))
        })
        .collect::<Result<Vec<Heatmap>>>()?;
    HeatmapStack::new(maps)
}

/// Area-average pooling over `stride`-sized blocks. Output dimensions are
/// `ceil(w / stride) x ceil(h / stride)`; when the stride does not divide a
/// dimension, edge blocks are averaged as if the map were zero-padded, so
/// every block divides by `stride * stride`.
pub fn downsample_heatmap(h: &Heatmap, stride: usize) -> Result<Heatmap> {
    if stride < 1 {
        return Err(Error::domain("stride must be >= 1"));
    }
    if stride == 1 {
        return Ok(h.clone());
    }
    let out_w = h.width().div_ceil(stride);
    let out_h = h.height().div_ceil(stride);
    let denom = (stride * stride) as f64;
    let mut values = Vec::with_capacity(out_w * out_h);
    for by in 0..out_h {
        for bx in 0..out_w {
            let mut acc = 0.0;
            for y in (by * stride)..((by + 1) * stride).min(h.height()) {
                for x in (bx * stride)..((bx + 1) * stride).min(h.width()) {
                    acc += h.grid().at(x, y);
                }
            }
            values.push(acc / denom);
        }
    }
    Ok(Heatmap {
        grid: Grid::new(out_w, out_h, values)?,
        lambda: h.lambda,
        normalization: h.normalization,
    })
}

pub(crate) fn heatmap_from_grid(grid: Grid, lambda: f64) -> Heatmap {
    Heatmap {
        grid,
        lambda,
        normalization: Normalization::Raw,
    }
}
