//! Uncompressed run-length mask coding: column-major pixel order, counts
//! alternating background/foreground with the first count on background.

use crate::error::{Error, Result};
use crate::grid::BinaryMask;

/// Decode `counts` into a mask. Pixel at column-major index `i` is foreground
/// iff `i` falls inside an odd-indexed run.
pub fn decode_rle(counts: &[usize], height: usize, width: usize) -> Result<BinaryMask> {
    let total: usize = counts.iter().sum();
    if total != height * width {
        return Err(Error::parse(
            0,
            format!(
                "RLE counts sum to {total}, expected {}x{} = {}",
                height,
                width,
                height * width
            ),
        ));
    }
    let mut bits = vec![false; width * height];
    let mut cm = 0usize;
    for (run, &count) in counts.iter().enumerate() {
        let value = run % 2 == 1;
        for _ in 0..count {
            let row = cm % height;
            let col = cm / height;
            bits[row * width + col] = value;
            cm += 1;
        }
    }
    BinaryMask::new(width, height, bits)
}

/// Inverse of [`decode_rle`]. The first count is the leading background run
/// and may be zero.
pub fn encode_rle(mask: &BinaryMask) -> Vec<usize> {
    let mut counts = Vec::new();
    let mut current = false;
    let mut run = 0usize;
    for col in 0..mask.width() {
        for row in 0..mask.height() {
            let b = mask.get(col, row);
            if b == current {
                run += 1;
            } else {
                counts.push(run);
                current = b;
                run = 1;
            }
        }
    }
    counts.push(run);
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_unrolled() {
        // 3 background, 2 foreground, 1 background in column-major order.
        let mask = decode_rle(&[3, 2, 1], 2, 3).unwrap();
        // Column-major indices 3 and 4 are (row 1, col 1) and (row 0, col 2).
        assert_eq!(
            mask.bits(),
            &[false, false, true, false, true, false],
            "foreground expected at column-major indices 3 and 4"
        );
        assert_eq!(mask.area(), 2);
    }

    #[test]
    fn leading_zero_run_gives_all_foreground() {
        let mask = decode_rle(&[0, 6], 2, 3).unwrap();
        assert_eq!(mask.area(), 6);
    }

    #[test]
    fn single_run_gives_all_background() {
        let mask = decode_rle(&[6], 2, 3).unwrap();
        assert_eq!(mask.area(), 0);
    }

    #[test]
    fn count_sum_mismatch_rejected() {
        assert!(matches!(
            decode_rle(&[3, 2], 2, 3),
            Err(crate::error::Error::Parse { .. })
        ));
    }

    #[test]
    fn encode_starts_on_background() {
        let mask = decode_rle(&[0, 2, 4], 2, 3).unwrap();
        assert_eq!(encode_rle(&mask), vec![0, 2, 4]);
    }

    #[test]
    fn encode_decode_round_trip() {
        let mask = decode_rle(&[1, 3, 2, 5, 1], 3, 4).unwrap();
        let counts = encode_rle(&mask);
        assert_eq!(decode_rle(&counts, 3, 4).unwrap(), mask);
    }
}
