//! Render the multi-scale stack of a mask as one side-by-side panel image.
//!
//! Usage: cargo run --example viz_panel

use pgmix::io::{write_grid, WriteKind};
use pgmix::pgm::{multiscale_stack, ComputePath, Normalization, DEFAULT_LAMBDAS};
use pgmix::viz::tile_stack;
use pgmix::BinaryMask;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two instances: a ring and a bar.
    let (width, height) = (80, 60);
    let mut bits = vec![false; width * height];
    for y in 0..height {
        for x in 0..width {
            let dx = x as f64 - 25.0;
            let dy = y as f64 - 30.0;
            let r = (dx * dx + dy * dy).sqrt();
            if (9.0..=14.0).contains(&r) {
                bits[y * width + x] = true;
            }
        }
    }
    for y in 20..40 {
        for x in 55..62 {
            bits[y * width + x] = true;
        }
    }
    let mask = BinaryMask::new(width, height, bits)?;

    let stack = multiscale_stack(
        &mask.to_luminance(),
        &DEFAULT_LAMBDAS,
        ComputePath::Separable,
        Normalization::MaxOne,
    )?;
    let panel = tile_stack(&stack)?;

    std::fs::create_dir_all("out")?;
    write_grid(&panel, "out/panel.pgm", WriteKind::NetpbmGray16)?;
    println!(
        "wrote out/panel.pgm: {}x{} (4 maps of {width}x{height} with 2px separators)",
        panel.width(),
        panel.height()
    );
    Ok(())
}
