//! Photometric Gaussian mixture heatmaps and instance-mask evaluation.
//!
//! The mixture sums one isotropic Gaussian per pixel, with amplitude equal
//! to the pixel's intensity and a shared extension parameter `lambda`.
//! Stacks of such heatmaps over increasing `lambda` make smooth supervision
//! targets for dense prediction. Around that core the crate provides:
//!
//! - [`pgm`] — exact, separable, and FFT mixture paths; multi-scale stacks;
//!   area-average downsampling to supervision resolutions.
//! - [`frequency`] — Butterworth high-pass boundary gain with residual
//!   application.
//! - [`losses`] — cross-entropy, BCE, Dice, and multi-scale heatmap
//!   regression terms with weighted totals.
//! - [`metrics`] — mask IoU, greedy matching, 101-point interpolated AP
//!   (mAP, AP50, AP75, area bands), and PR curves.
//! - [`io`] — bit-exact Netpbm P5 and PFM grids, uncompressed RLE masks,
//!   and the annotation JSON schema.
//! - [`bench`] and [`viz`] — the timing harness and stack tiling behind the
//!   `pgmix` binary.
//!
//! Everything is deterministic: pure functions over immutable grids, fixed
//! seeds where randomness is involved, and stable orderings in the
//! evaluator.
//!
//! ```
//! use pgmix::pgm::{multiscale_stack, ComputePath, Normalization};
//! use pgmix::BinaryMask;
//!
//! let mut bits = vec![false; 64 * 64];
//! for y in 20..40 {
//!     for x in 24..44 {
//!         bits[y * 64 + x] = true;
//!     }
//! }
//! let mask = BinaryMask::new(64, 64, bits).unwrap();
//! let stack = multiscale_stack(
//!     &mask.to_luminance(),
//!     &[1.0, 5.0, 10.0, 20.0],
//!     ComputePath::Separable,
//!     Normalization::MaxOne,
//! )
//! .unwrap();
//! assert_eq!(stack.len(), 4);
//! ```

pub mod bench;
pub mod cli;
mod error;
mod fft_util;
pub mod frequency;
mod grid;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod pgm;
pub mod viz;

pub use error::{Error, Result};
pub use grid::{BinaryMask, BoundingBox, Grid, LuminanceGrid};
