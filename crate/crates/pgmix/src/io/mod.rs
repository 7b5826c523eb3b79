//! Bit-exact file formats: binary Netpbm (P5), single-channel PFM,
//! uncompressed RLE masks, and the annotation JSON schema.

mod annotations;
mod netpbm;
mod pfm;
mod rle;

pub use annotations::{
    load_annotations, AnnotationKind, AnnotationSet, Detection, InstanceAnnotation, PerImage,
};
pub use rle::{decode_rle, encode_rle};

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, LuminanceGrid};

/// Input grid encodings accepted by [`read_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadKind {
    /// Binary P5, maxval 255 or 65535; samples scaled by 1/maxval.
    NetpbmGray,
    /// Single-channel "Pf", scale -1.0 (little-endian), values taken verbatim.
    PfmFloat,
}

/// Output grid encodings accepted by [`write_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WriteKind {
    /// Binary P5 with maxval 65535; input values must lie in [0, 1].
    NetpbmGray16,
    /// Single-channel "Pf"; values stored as little-endian f32.
    PfmFloat,
}

/// Read a grid from `path`, normalizing row order to top-to-bottom.
pub fn read_grid(path: impl AsRef<Path>, kind: ReadKind) -> Result<LuminanceGrid> {
    let bytes = std::fs::read(path)?;
    read_grid_bytes(&bytes, kind)
}

/// Read a grid, detecting the encoding from the magic bytes.
pub fn read_grid_auto(path: impl AsRef<Path>) -> Result<LuminanceGrid> {
    let bytes = std::fs::read(path)?;
    match bytes.get(..2) {
        Some(b"P5") => read_grid_bytes(&bytes, ReadKind::NetpbmGray),
        Some(b"Pf") => read_grid_bytes(&bytes, ReadKind::PfmFloat),
        _ => Err(Error::parse(0, "unrecognized magic; expected P5 or Pf")),
    }
}

pub fn read_grid_bytes(bytes: &[u8], kind: ReadKind) -> Result<LuminanceGrid> {
    match kind {
        ReadKind::NetpbmGray => netpbm::read_p5(bytes),
        ReadKind::PfmFloat => pfm::read(bytes),
    }
}

/// Serialize `grid` to `path`. The file is written only after the whole
/// buffer has been validated and encoded.
pub fn write_grid(grid: &Grid, path: impl AsRef<Path>, kind: WriteKind) -> Result<()> {
    let bytes = write_grid_bytes(grid, kind)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn write_grid_bytes(grid: &Grid, kind: WriteKind) -> Result<Vec<u8>> {
    match kind {
        WriteKind::NetpbmGray16 => netpbm::write_p5_gray16(grid),
        WriteKind::PfmFloat => pfm::write(grid),
    }
}

/// Byte cursor with offset tracking for parse errors.
pub(crate) struct ByteCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteCursor<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> &'a [u8] {
        &self.data[self.pos..]
    }

    pub(crate) fn expect(&mut self, tag: &[u8], what: &str) -> Result<()> {
        if self.remaining().starts_with(tag) {
            self.pos += tag.len();
            Ok(())
        } else {
            Err(Error::parse(self.pos, format!("expected {what}")))
        }
    }

    fn is_ws(b: u8) -> bool {
        matches!(b, b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c)
    }

    /// Skip whitespace and `#` comments (Netpbm header rules).
    pub(crate) fn skip_ws_and_comments(&mut self) {
        loop {
            while self.pos < self.data.len() && Self::is_ws(self.data[self.pos]) {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    /// Read one non-whitespace token.
    pub(crate) fn read_token(&mut self) -> Result<(&'a [u8], usize)> {
        let start = self.pos;
        while self.pos < self.data.len() && !Self::is_ws(self.data[self.pos]) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::parse(start, "expected a token"));
        }
        Ok((&self.data[start..self.pos], start))
    }

    pub(crate) fn read_uint(&mut self, what: &str) -> Result<usize> {
        let (tok, start) = self.read_token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::parse(start, format!("invalid {what}")))
    }

    /// Consume exactly one whitespace byte (the separator before raster data).
    pub(crate) fn expect_single_ws(&mut self) -> Result<()> {
        match self.data.get(self.pos) {
            Some(&b) if Self::is_ws(b) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::parse(
                self.pos,
                "expected single whitespace before raster data",
            )),
        }
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::parse(
                self.data.len(),
                format!("unexpected end of file in {what}"),
            ));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub(crate) fn expect_eof(&self) -> Result<()> {
        if self.pos != self.data.len() {
            return Err(Error::parse(self.pos, "trailing bytes after raster data"));
        }
        Ok(())
    }
}
