//! Timing harness for the mixture evaluation paths.
//!
//! Synthesizes a seeded random binary mask, times each requested path over
//! repeated runs, and cross-checks the outputs against the most exact path
//! present. The quadratic exact path is refused above a pixel budget unless
//! forced; its cost is then extrapolated from a small probe instead.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::LuminanceGrid;
use crate::pgm::{
    default_truncation_radius, pgm_exact, pgm_fft, pgm_separable, ComputePath, Heatmap, Truncation,
};

/// Quadratic-path refusal threshold: 128x128 pixels.
pub const DEFAULT_MAX_EXACT_PIXELS: usize = 128 * 128;

pub const DEFAULT_BENCH_SEED: u64 = 42;

/// Probe size used to extrapolate the exact path when it is not run.
const EXACT_PROBE: (usize, usize) = (64, 48);

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub width: usize,
    pub height: usize,
    pub lambda: f64,
    pub paths: Vec<ComputePath>,
    pub repetitions: usize,
    pub seed: u64,
    pub max_exact_pixels: usize,
    pub force: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            lambda: 10.0,
            paths: vec![ComputePath::Separable, ComputePath::Fft],
            repetitions: 5,
            seed: DEFAULT_BENCH_SEED,
            max_exact_pixels: DEFAULT_MAX_EXACT_PIXELS,
            force: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PathTiming {
    pub path: ComputePath,
    pub median_seconds: f64,
    pub times_seconds: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactExtrapolation {
    pub probe_width: usize,
    pub probe_height: usize,
    pub probe_seconds: f64,
    /// Probe time scaled by the quadratic cost ratio ((W*H)/(pw*ph))^2.
    pub extrapolated_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub lambda: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub mask_area: usize,
    /// Path the deviations are measured against (most exact one present).
    pub reference: ComputePath,
    pub paths: Vec<PathTiming>,
    /// Sup-norm deviation of each non-reference path, relative to the
    /// reference maximum.
    pub max_relative_deviation: std::collections::BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_extrapolation: Option<ExactExtrapolation>,
}

/// Seeded Bernoulli(1/2) binary mask as {0, 1} luminance.
pub fn synth_mask(width: usize, height: usize, seed: u64) -> Result<LuminanceGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..width * height)
        .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
        .collect();
    LuminanceGrid::new(width, height, values)
}

fn path_name(path: ComputePath) -> &'static str {
    match path {
        ComputePath::Exact => "exact",
        ComputePath::Separable => "separable",
        ComputePath::Fft => "fft",
    }
}

fn run_path(input: &LuminanceGrid, lambda: f64, path: ComputePath) -> Result<Heatmap> {
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

fn median(times: &[f64]) -> f64 {
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn sup_rel_deviation(values: &[f64], reference: &[f64]) -> f64 {
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

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.width == 0 || cfg.height == 0 {
        return Err(Error::domain("benchmark size must be positive"));
    }
    if cfg.paths.is_empty() {
        return Err(Error::domain("at least one path must be requested"));
    }
    if cfg.repetitions < 5 {
        return Err(Error::domain("benchmark needs at least 5 repetitions"));
    }
    let pixels = cfg.width * cfg.height;
    if cfg.paths.contains(&ComputePath::Exact) && pixels > cfg.max_exact_pixels && !cfg.force {
        return Err(Error::resource(format!(
            "exact path refused at {}x{} = {pixels} pixels (budget {}); pass force to override",
            cfg.width, cfg.height, cfg.max_exact_pixels
        )));
    }

    let mask = synth_mask(cfg.width, cfg.height, cfg.seed)?;
    let mask_area = mask.values().iter().filter(|&&v| v == 1.0).count();

    let mut timings = Vec::new();
    let mut outputs: Vec<(ComputePath, Heatmap)> = Vec::new();
    for &path in &cfg.paths {
        let mut times = Vec::with_capacity(cfg.repetitions);
        let mut result = None;
        for _ in 0..cfg.repetitions {
            let start = Instant::now();
            let map = run_path(&mask, cfg.lambda, path)?;
            times.push(start.elapsed().as_secs_f64());
            result = Some(map);
        }
        outputs.push((path, result.expect("at least one repetition ran")));
        timings.push(PathTiming {
            path,
            median_seconds: median(&times),
            times_seconds: times,
        });
    }

    // Exact beats separable beats FFT as the comparison reference.
    let precedence = [ComputePath::Exact, ComputePath::Separable, ComputePath::Fft];
    let reference = *precedence
        .iter()
        .find(|p| cfg.paths.contains(p))
        .expect("paths is non-empty");
    let ref_values = outputs
        .iter()
        .find(|(p, _)| *p == reference)
        .map(|(_, h)| h.values().to_vec())
        .expect("reference was executed");

    let mut max_relative_deviation = std::collections::BTreeMap::new();
    for (path, map) in &outputs {
        if *path == reference {
            continue;
        }
        max_relative_deviation.insert(
            path_name(*path).to_string(),
            sup_rel_deviation(map.values(), &ref_values),
        );
    }

    let exact_extrapolation = if cfg.paths.contains(&ComputePath::Exact) {
        None
    } else {
        let probe_w = EXACT_PROBE.0.min(cfg.width);
        let probe_h = EXACT_PROBE.1.min(cfg.height);
        let probe_mask = synth_mask(probe_w, probe_h, cfg.seed)?;
        let start = Instant::now();
        let _ = pgm_exact(&probe_mask, cfg.lambda)?;
        let probe_seconds = start.elapsed().as_secs_f64();
        let ratio = pixels as f64 / (probe_w * probe_h) as f64;
        Some(ExactExtrapolation {
            probe_width: probe_w,
            probe_height: probe_h,
            probe_seconds,
            extrapolated_seconds: probe_seconds * ratio * ratio,
        })
    };

    Ok(BenchReport {
        width: cfg.width,
        height: cfg.height,
        lambda: cfg.lambda,
        seed: cfg.seed,
        repetitions: cfg.repetitions,
        mask_area,
        reference,
        paths: timings,
        max_relative_deviation,
        exact_extrapolation,
    })
}
