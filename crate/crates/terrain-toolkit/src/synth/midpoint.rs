//! Diamond-square midpoint displacement for self-affine fBm-style
//! surfaces. Requires a (2^k + 1)-cell grid; corner seeds are drawn once
//! and never rewritten.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generate a size x size surface (size = 2^k + 1) with spectral exponent
/// `roughness` (H in (0, 1]): displacement amplitude shrinks by 2^-H per
/// subdivision level. Output is not re-normalized, so the corner values
/// remain exactly as seeded.
pub(crate) fn diamond_square(seed: u64, size: usize, roughness: f64, relief: f64) -> Vec<f64> {
    debug_assert!(size >= 3 && (size - 1).is_power_of_two());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = vec![0.0f64; size * size];
    let last = size - 1;

    let draw = |rng: &mut ChaCha8Rng, amp: f64| (rng.random::<f64>() * 2.0 - 1.0) * amp;

    // Corner seeds in the middle half of the relief range.
    for &(r, c) in &[(0, 0), (0, last), (last, 0), (last, last)] {
        grid[r * size + c] = relief * (0.25 + 0.5 * rng.random::<f64>());
    }

    let mut step = last;
    let mut amplitude = relief * 0.5;
    let level_decay = 2.0f64.powf(-roughness);

    while step > 1 {
        let half = step / 2;

        // Diamond phase: square centers from their four corners.
        for row in (half..size).step_by(step) {
            for col in (half..size).step_by(step) {
                let sum = grid[(row - half) * size + (col - half)]
                    + grid[(row - half) * size + (col + half)]
                    + grid[(row + half) * size + (col - half)]
                    + grid[(row + half) * size + (col + half)];
                grid[row * size + col] = sum / 4.0 + draw(&mut rng, amplitude);
            }
        }

        // Square phase: edge midpoints from their orthogonal neighbors.
        for row in (0..size).step_by(half) {
            let col_start = if (row / half).is_multiple_of(2) { half } else { 0 };
            for col in (col_start..size).step_by(step) {
                let mut sum = 0.0;
                let mut count = 0.0;
                if row >= half {
                    sum += grid[(row - half) * size + col];
                    count += 1.0;
                }
                if row + half < size {
                    sum += grid[(row + half) * size + col];
                    count += 1.0;
                }
                if col >= half {
                    sum += grid[row * size + (col - half)];
                    count += 1.0;
                }
                if col + half < size {
                    sum += grid[row * size + (col + half)];
                    count += 1.0;
                }
                grid[row * size + col] = sum / count + draw(&mut rng, amplitude);
            }
        }

        step = half;
        amplitude *= level_decay;
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = diamond_square(5, 33, 0.85, 600.0);
        let b = diamond_square(5, 33, 0.85, 600.0);
        assert_eq!(a, b);
        assert_ne!(a, diamond_square(6, 33, 0.85, 600.0));
    }

    #[test]
    fn corners_keep_their_seeded_values() {
        let size = 65;
        let grid = diamond_square(11, size, 0.8, 500.0);
        // Re-derive the corner draws from the same stream.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let expected: Vec<f64> = (0..4).map(|_| 500.0 * (0.25 + 0.5 * rng.random::<f64>())).collect();
        let last = size - 1;
        assert_eq!(grid[0], expected[0]);
        assert_eq!(grid[last], expected[1]);
        assert_eq!(grid[last * size], expected[2]);
        assert_eq!(grid[last * size + last], expected[3]);
    }

    #[test]
    fn every_cell_is_written() {
        let grid = diamond_square(3, 17, 0.9, 400.0);
        // The interior of a freshly subdivided grid should not retain the
        // zero initialization anywhere (corners are nonzero by seeding).
        let zeros = grid.iter().filter(|&&v| v == 0.0).count();
        assert_eq!(zeros, 0);
    }
}
