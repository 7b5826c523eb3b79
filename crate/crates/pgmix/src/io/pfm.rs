//! Single-channel PFM ("Pf"), scale -1.0, little-endian f32 samples.
//!
//! Rows are stored bottom-to-top on disk and normalized to top-to-bottom in
//! memory. Values are stored verbatim, so write-then-read is bit-exact for
//! any grid whose values are f32-representable.

use super::ByteCursor;
use crate::error::{Error, Result};
use crate::grid::{Grid, LuminanceGrid};

pub(super) fn read(bytes: &[u8]) -> Result<LuminanceGrid> {
    let mut cur = ByteCursor::new(bytes);
    cur.expect(b"Pf", "Pf magic")?;
    cur.skip_ws_and_comments();
    let width = cur.read_uint("width")?;
    cur.skip_ws_and_comments();
    let height = cur.read_uint("height")?;
    cur.skip_ws_and_comments();
    let (scale_tok, scale_pos) = cur.read_token()?;
    let scale: f64 = std::str::from_utf8(scale_tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(scale_pos, "invalid scale field"))?;
    if scale != -1.0 {
        return Err(Error::parse(
            scale_pos,
            format!("unsupported scale {scale}; expected -1.0 (little-endian)"),
        ));
    }
    cur.expect_single_ws()?;

    if width == 0 || height == 0 {
        return Err(Error::parse(0, "zero image dimension"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(0, "image dimensions overflow"))?;
    let raster = cur.take(count * 4, "raster")?;
    cur.expect_eof()?;

    let mut values = vec![0.0f64; count];
    for (disk_row, row_bytes) in raster.chunks_exact(width * 4).enumerate() {
        let mem_row = height - 1 - disk_row;
        for (x, sample) in row_bytes.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes([sample[0], sample[1], sample[2], sample[3]]) as f64;
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::range(format!(
                    "PFM sample {v} at ({x}, {mem_row}) outside [0, 1]"
                )));
            }
            values[mem_row * width + x] = v;
        }
    }
    LuminanceGrid::new(width, height, values)
}

pub(super) fn write(grid: &Grid) -> Result<Vec<u8>> {
    for (i, v) in grid.values().iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::range(format!("non-finite value at index {i}")));
        }
    }
    let mut out = Vec::with_capacity(32 + grid.values().len() * 4);
    out.extend_from_slice(format!("Pf\n{} {}\n-1.0\n", grid.width(), grid.height()).as_bytes());
    for mem_row in (0..grid.height()).rev() {
        for x in 0..grid.width() {
            out.extend_from_slice(&(grid.at(x, mem_row) as f32).to_le_bytes());
        }
    }
    Ok(out)
}
