//! Dense 2D containers: real-valued grids, [0, 1] luminance grids, and binary masks.
//!
//! All containers are row-major with pixel `(x, y)` at index `y * width + x`,
//! immutable after construction, and safe to share across threads.

use crate::error::{Error, Result};

/// Unconstrained real-valued grid. The workhorse buffer behind heatmaps,
/// gain maps, and prediction grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::domain(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::domain(format!(
                "value count {} does not match {width}x{height}",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.values[y * self.width + x] = value;
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn transposed(&self) -> Grid {
        let mut values = vec![0.0; self.values.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                values[x * self.height + y] = self.at(x, y);
            }
        }
        Grid {
            width: self.height,
            height: self.width,
            values,
        }
    }

    pub fn flipped_horizontal(&self) -> Grid {
        let mut values = vec![0.0; self.values.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                values[y * self.width + (self.width - 1 - x)] = self.at(x, y);
            }
        }
        Grid {
            width: self.width,
            height: self.height,
            values,
        }
    }

    pub fn flipped_vertical(&self) -> Grid {
        let mut values = vec![0.0; self.values.len()];
        for y in 0..self.height {
            for x in 0..self.width {
                values[(self.height - 1 - y) * self.width + x] = self.at(x, y);
            }
        }
        Grid {
            width: self.width,
            height: self.height,
            values,
        }
    }
}

/// Grid of intensities constrained to finite values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceGrid(Grid);

impl LuminanceGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        Self::from_grid(Grid::new(width, height, values)?)
    }

    pub fn from_grid(grid: Grid) -> Result<Self> {
        for (i, v) in grid.values().iter().enumerate() {
            if !v.is_finite() || *v < 0.0 || *v > 1.0 {
                return Err(Error::range(format!(
                    "luminance value {v} at index {i} outside [0, 1]"
                )));
            }
        }
        Ok(Self(grid))
    }

    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn into_grid(self) -> Grid {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.0.at(x, y)
    }

    /// Exact inverse of [`BinaryMask::to_luminance`]. Values other than 0.0
    /// and 1.0 are rejected so the round trip stays lossless.
    pub fn to_mask(&self) -> Result<BinaryMask> {
        let bits = self
            .values()
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    Ok(false)
                } else if v == 1.0 {
                    Ok(true)
                } else {
                    Err(Error::domain(format!(
                        "luminance value {v} is not exactly 0 or 1"
                    )))
                }
            })
            .collect::<Result<Vec<bool>>>()?;
        BinaryMask::new(self.width(), self.height(), bits)
    }
}

/// Tight axis-aligned bounding box in pixels. The empty mask maps to the
/// all-zero sentinel rather than an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x_min: usize,
    pub y_min: usize,
    pub width: usize,
    pub height: usize,
}

impl BoundingBox {
    pub const EMPTY: BoundingBox = BoundingBox {
        x_min: 0,
        y_min: 0,
        width: 0,
        height: 0,
    };
}

/// Row-major boolean mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::domain(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::domain(format!(
                "bit count {} does not match {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn same_shape(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Number of foreground pixels.
    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Tightest rectangle containing every foreground pixel;
    /// [`BoundingBox::EMPTY`] for the all-background mask.
    pub fn tight_bbox(&self) -> BoundingBox {
        let mut x_min = usize::MAX;
        let mut y_min = usize::MAX;
        let mut x_max = 0usize;
        let mut y_max = 0usize;
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    any = true;
                    x_min = x_min.min(x);
                    y_min = y_min.min(y);
                    x_max = x_max.max(x);
                    y_max = y_max.max(y);
                }
            }
        }
        if !any {
            return BoundingBox::EMPTY;
        }
        BoundingBox {
            x_min,
            y_min,
            width: x_max - x_min + 1,
            height: y_max - y_min + 1,
        }
    }

    /// Cast to {0, 1} luminance. Lossless; see [`LuminanceGrid::to_mask`].
    pub fn to_luminance(&self) -> LuminanceGrid {
        let values = self
            .bits
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        LuminanceGrid(Grid {
            width: self.width,
            height: self.height,
            values,
        })
    }
}
