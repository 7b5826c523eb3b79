//! Panel rendering for heatmap stacks.

use crate::error::Result;
use crate::grid::Grid;
use crate::pgm::{normalize_heatmap, HeatmapStack, Normalization};

/// Width in pixels of the black separator between tiled maps.
pub const SEPARATOR_WIDTH: usize = 2;

/// Tile a stack side by side into one grid: each map max-one normalized,
/// maps in lambda order, 2-pixel black separators. For `n` maps of size
/// `W x H` the panel is `(n*W + 2*(n-1)) x H`.
pub fn tile_stack(stack: &HeatmapStack) -> Result<Grid> {
    let maps = stack.maps();
    let map_w = maps[0].width();
    let map_h = maps[0].height();
    let n = maps.len();
    let panel_w = n * map_w + SEPARATOR_WIDTH * (n - 1);
    let mut panel = Grid::zeros(panel_w, map_h)?;
    for (i, map) in maps.iter().enumerate() {
        let normalized = normalize_heatmap(map, Normalization::MaxOne);
        let x_off = i * (map_w + SEPARATOR_WIDTH);
        for y in 0..map_h {
            for x in 0..map_w {
                panel.set(x_off + x, y, normalized.grid().at(x, y));
            }
        }
    }
    Ok(panel)
}
