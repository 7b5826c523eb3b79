//! Boundary-gain filtering: compute the high-pass gain map of a grid with a
//! sharp edge and apply it residually.
//!
//! Usage: cargo run --example boundary_gain

use pgmix::frequency::{fan_apply, fan_gain, FanConfig};
use pgmix::io::{write_grid, WriteKind};
use pgmix::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Step edge with a soft gradient on one side.
    let (width, height) = (64, 64);
    let mut values = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            values[y * width + x] = if x < 32 {
                0.2
            } else {
                0.8 + 0.1 * (y as f64 / height as f64)
            };
        }
    }
    let feature = Grid::new(width, height, values)?;

    let cfg = FanConfig::default();
    let gain = fan_gain(&feature, &cfg)?;
    let filtered = fan_apply(&feature, &gain, cfg.alpha())?;

    // The gain concentrates at the edge column; flat regions stay near zero.
    let edge_gain: f64 = (0..height).map(|y| gain.at(32, y).abs()).sum::<f64>() / height as f64;
    let flat_gain: f64 = (0..height).map(|y| gain.at(8, y).abs()).sum::<f64>() / height as f64;
    println!("mean |gain| at the edge column: {edge_gain:.4}");
    println!("mean |gain| in the flat region: {flat_gain:.4}");

    std::fs::create_dir_all("out")?;
    write_grid(&gain, "out/edge_gain.pfm", WriteKind::PfmFloat)?;
    write_grid(&filtered, "out/edge_filtered.pfm", WriteKind::PfmFloat)?;
    println!("wrote out/edge_gain.pfm and out/edge_filtered.pfm");
    Ok(())
}
