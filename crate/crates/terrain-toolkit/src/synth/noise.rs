//! Seeded gradient noise and its multi-octave sums (plain and ridged).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Classic 2D gradient noise over an integer lattice with a seeded
/// permutation table and unit gradient vectors on the 8 compass
/// directions. Output is continuous and zero at lattice points.
pub(crate) struct Perlin {
    perm: [u8; 512],
}

// Unit gradients at 45-degree increments.
const GRADIENTS: [(f64, f64); 8] = {
    const D: f64 = std::f64::consts::FRAC_1_SQRT_2;
    [
        (1.0, 0.0),
        (D, D),
        (0.0, 1.0),
        (-D, D),
        (-1.0, 0.0),
        (-D, -D),
        (0.0, -1.0),
        (D, -D),
    ]
};

#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

impl Perlin {
    pub fn new(seed: u64) -> Perlin {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table: [u8; 256] = std::array::from_fn(|i| i as u8);
        table.shuffle(&mut rng);
        let mut perm = [0u8; 512];
        perm[..256].copy_from_slice(&table);
        perm[256..].copy_from_slice(&table);
        Perlin { perm }
    }

    #[inline]
    fn gradient(&self, xi: i64, yi: i64) -> (f64, f64) {
        let h = self.perm
            [(self.perm[(xi & 255) as usize] as usize) + (yi & 255) as usize] as usize;
        GRADIENTS[h & 7]
    }

    /// Sample at lattice coordinates. Range is within +-sqrt(2)/2.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let xi = x0 as i64;
        let yi = y0 as i64;
        let fx = x - x0;
        let fy = y - y0;

        let dot = |gx: i64, gy: i64, dx: f64, dy: f64| -> f64 {
            let (gvx, gvy) = self.gradient(gx, gy);
            gvx * dx + gvy * dy
        };
        let a00 = dot(xi, yi, fx, fy);
        let a10 = dot(xi + 1, yi, fx - 1.0, fy);
        let a01 = dot(xi, yi + 1, fx, fy - 1.0);
        let a11 = dot(xi + 1, yi + 1, fx - 1.0, fy - 1.0);

        let u = fade(fx);
        let v = fade(fy);
        let top = a00 + u * (a10 - a00);
        let bottom = a01 + u * (a11 - a01);
        top + v * (bottom - top)
    }
}

fn octave_seed(seed: u64, octave: u32) -> u64 {
    seed.wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(octave as u64 + 1))
}

/// Sum `octaves` gradient-noise layers over a size x size grid spanning
/// `frequency` lattice units. `ridged` applies the per-octave transform
/// 1 - |n| before summation. Raw values, not normalized.
pub(crate) fn octave_grid(
    seed: u64,
    size: usize,
    frequency: f64,
    octaves: u32,
    lacunarity: f64,
    gain: f64,
    ridged: bool,
) -> Vec<f64> {
    let mut values = vec![0.0f64; size * size];
    let span = (size - 1) as f64;
    let mut amplitude = 1.0;
    let mut freq = frequency;
    for octave in 0..octaves {
        let perlin = Perlin::new(octave_seed(seed, octave));
        // Decorrelate octave lattices with a seeded offset.
        let mut rng = ChaCha8Rng::seed_from_u64(octave_seed(seed, octave) ^ 0x5DEECE66D);
        let ox = rand::Rng::random::<f64>(&mut rng) * 256.0;
        let oy = rand::Rng::random::<f64>(&mut rng) * 256.0;
        for row in 0..size {
            let y = row as f64 / span * freq + oy;
            for col in 0..size {
                let x = col as f64 / span * freq + ox;
                let n = perlin.sample(x, y);
                let value = if ridged { 1.0 - n.abs() } else { n };
                values[row * size + col] += amplitude * value;
            }
        }
        amplitude *= gain;
        freq *= lacunarity;
    }
    values
}

/// Affinely rescale values so min maps to 0 and max to `relief`. A
/// constant input maps to all zeros.
pub(crate) fn normalize_to_relief(values: &mut [f64], relief: f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    for v in values.iter_mut() {
        *v = if range > 0.0 {
            (*v - lo) / range * relief
        } else {
            0.0
        };
    }
}
