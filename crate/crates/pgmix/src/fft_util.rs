//! Shared 2D FFT plumbing on row-major complex buffers.

use rustfft::num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

/// In-place 2D FFT: rows first, then columns via transpose.
pub(crate) fn fft_2d(
    buf: &mut Vec<Complex<f64>>,
    width: usize,
    height: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(buf.len(), width * height);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(width, direction);
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }

    let mut t = transpose(buf, width, height);
    let col_fft = planner.plan_fft(height, direction);
    for col in t.chunks_exact_mut(height) {
        col_fft.process(col);
    }
    *buf = transpose(&t, height, width);
}

fn transpose(buf: &[Complex<f64>], width: usize, height: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); buf.len()];
    for y in 0..height {
        for x in 0..width {
            out[x * height + y] = buf[y * width + x];
        }
    }
    out
}

pub(crate) fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}
