//! Compare the three mixture evaluation paths on one grid: wall time and
//! agreement with the exact sum.
//!
//! Usage: cargo run --release --example compare_paths

use std::time::Instant;

use pgmix::bench::synth_mask;
use pgmix::pgm::{default_truncation_radius, pgm_exact, pgm_fft, pgm_separable, Truncation};

fn sup_rel(values: &[f64], reference: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values
        .iter()
        .zip(reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (width, height) = (96, 96);
    let lambda = 5.0;
    let mask = synth_mask(width, height, 42)?;
    println!("{width}x{height} random mask, lambda {lambda}");

    let start = Instant::now();
    let exact = pgm_exact(&mask, lambda)?;
    println!("exact:     {:>8.1} ms", start.elapsed().as_secs_f64() * 1e3);

    let radius = default_truncation_radius(lambda);
    let start = Instant::now();
    let sep = pgm_separable(&mask, lambda, Truncation::Radius(radius))?;
    println!(
        "separable: {:>8.1} ms (radius {radius}), deviation {:.2e}",
        start.elapsed().as_secs_f64() * 1e3,
        sup_rel(sep.values(), exact.values())
    );

    let start = Instant::now();
    let fft = pgm_fft(&mask, lambda)?;
    println!(
        "fft:       {:>8.1} ms, deviation {:.2e}",
        start.elapsed().as_secs_f64() * 1e3,
        sup_rel(fft.values(), exact.values())
    );
    Ok(())
}
