//! Binary Netpbm graymap (P5) with maxval 255 or 65535.
//!
//! 16-bit samples are big-endian per the Netpbm convention. Integer samples
//! scale by 1/maxval into [0, 1] on read and by 65535 on 16-bit write.

use super::ByteCursor;
use crate::error::{Error, Result};
use crate::grid::{Grid, LuminanceGrid};

pub(super) fn read_p5(bytes: &[u8]) -> Result<LuminanceGrid> {
    let mut cur = ByteCursor::new(bytes);
    cur.expect(b"P5", "P5 magic")?;
    cur.skip_ws_and_comments();
    let width = cur.read_uint("width")?;
    cur.skip_ws_and_comments();
    let height = cur.read_uint("height")?;
    cur.skip_ws_and_comments();
    let maxval_pos = cur.pos();
    let maxval = cur.read_uint("maxval")?;
    if maxval != 255 && maxval != 65535 {
        return Err(Error::parse(
            maxval_pos,
            format!("unsupported maxval {maxval}; expected 255 or 65535"),
        ));
    }
    cur.expect_single_ws()?;

    if width == 0 || height == 0 {
        return Err(Error::parse(0, "zero image dimension"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(0, "image dimensions overflow"))?;

    let scale = 1.0 / maxval as f64;
    let values = if maxval == 255 {
        let raster = cur.take(count, "raster")?;
        raster.iter().map(|&b| b as f64 * scale).collect()
    } else {
        let raster = cur.take(count * 2, "raster")?;
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    };
    cur.expect_eof()?;

    LuminanceGrid::new(width, height, values)
}

pub(super) fn write_p5_gray16(grid: &Grid) -> Result<Vec<u8>> {
    for (i, v) in grid.values().iter().enumerate() {
        if !v.is_finite() || *v < 0.0 || *v > 1.0 {
            return Err(Error::range(format!(
                "gray16 sample {v} at index {i} outside [0, 1]; normalize first"
            )));
        }
    }
    let mut out = Vec::with_capacity(32 + grid.values().len() * 2);
    out.extend_from_slice(format!("P5\n{} {}\n65535\n", grid.width(), grid.height()).as_bytes());
    for v in grid.values() {
        let sample = (v * 65535.0).round() as u16;
        out.extend_from_slice(&sample.to_be_bytes());
    }
    Ok(out)
}
