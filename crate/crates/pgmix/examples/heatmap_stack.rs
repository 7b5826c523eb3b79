//! Build a multi-scale heatmap stack from a synthetic instance mask and
//! write one PFM per scale.
//!
//! Usage: cargo run --example heatmap_stack

use pgmix::io::{write_grid, WriteKind};
use pgmix::pgm::{multiscale_stack, ComputePath, Normalization, DEFAULT_LAMBDAS};
use pgmix::BinaryMask;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A small blob mask standing in for a ground-truth instance.
    let (width, height) = (96, 64);
    let mut bits = vec![false; width * height];
    for y in 18..46 {
        for x in 30..70 {
            let dx = x as f64 - 50.0;
            let dy = y as f64 - 32.0;
            if dx * dx / 400.0 + dy * dy / 196.0 <= 1.0 {
                bits[y * width + x] = true;
            }
        }
    }
    let mask = BinaryMask::new(width, height, bits)?;
    println!("mask: {}x{}, area {} px", width, height, mask.area());

    let stack = multiscale_stack(
        &mask.to_luminance(),
        &DEFAULT_LAMBDAS,
        ComputePath::Separable,
        Normalization::MaxOne,
    )?;

    std::fs::create_dir_all("out")?;
    for map in stack.maps() {
        let above_half = map.values().iter().filter(|&&v| v > 0.5).count();
        let file = format!("out/blob_lambda{}.pfm", map.lambda());
        write_grid(map.grid(), &file, WriteKind::PfmFloat)?;
        println!(
            "lambda {:>4}: {} px above half intensity -> {file}",
            map.lambda(),
            above_half
        );
    }
    Ok(())
}
