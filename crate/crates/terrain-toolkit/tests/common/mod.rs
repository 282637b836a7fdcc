//! Shared helpers for the integration suites: an independent transcription
//! of the reference geomorphon classifier used to produce and check the
//! golden parity rasters, plus fixture paths.

// Each test binary compiles its own copy and uses a subset.
#![allow(dead_code)]

use std::path::PathBuf;

use terrain_toolkit::raster::HeightField;

/// Unclassified margin marker in golden rasters.
pub const MARGIN: u8 = 255;

// The reference implementation's decision table, indexed by
// [count of -1][count of +1], in its native class codes:
// 1 flat, 2 summit, 3 ridge, 4 shoulder, 5 spur, 6 slope, 7 hollow,
// 8 footslope, 9 valley, 10 depression. 0 marks infeasible count pairs.
const REFERENCE_FORMS: [[u8; 9]; 9] = [
    [1, 1, 1, 8, 8, 9, 9, 9, 10],
    [1, 1, 8, 8, 8, 9, 9, 9, 0],
    [1, 4, 6, 6, 7, 7, 9, 0, 0],
    [4, 4, 6, 6, 6, 7, 0, 0, 0],
    [4, 4, 5, 6, 6, 0, 0, 0, 0],
    [3, 3, 5, 5, 0, 0, 0, 0, 0],
    [3, 3, 3, 0, 0, 0, 0, 0, 0],
    [3, 3, 0, 0, 0, 0, 0, 0, 0],
    [2, 0, 0, 0, 0, 0, 0, 0, 0],
];

// Reference class code -> canonical class index
// (depression, summit, flat, valley, ridge, hollow, spur, shoulder,
// slope, footslope).
const REFERENCE_TO_CANONICAL: [u8; 11] = [255, 2, 1, 4, 7, 6, 8, 5, 9, 3, 0];

const COMPASS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];

/// Zenith and nadir line-of-sight angles (degrees) of one cell along one
/// compass direction, out to `radius` cells.
fn zenith_nadir(field: &HeightField, row: usize, col: usize, dir: usize, radius: usize) -> (f64, f64) {
    let (dr, dc) = COMPASS[dir];
    let step_len = if dr != 0 && dc != 0 {
        field.cell_size() * std::f64::consts::SQRT_2
    } else {
        field.cell_size()
    };
    let center = field.get(row, col);
    let mut zenith = f64::NEG_INFINITY;
    let mut nadir = f64::INFINITY;
    for k in 1..=radius as i64 {
        let r = (row as i64 + dr * k) as usize;
        let c = (col as i64 + dc * k) as usize;
        let relief = field.get(r, c) - center;
        let distance = step_len * k as f64;
        let angle = relief.atan2(distance).to_degrees();
        if angle > zenith {
            zenith = angle;
        }
        if angle < nadir {
            nadir = angle;
        }
    }
    (zenith, nadir)
}

/// Classify every interior cell the reference way and return canonical
/// class indices (255 in the border margin).
pub fn oracle_classify(field: &HeightField, radius: usize, flat_deg: f64) -> Vec<u8> {
    let (w, h) = (field.width(), field.height());
    let mut out = vec![MARGIN; w * h];
    for row in radius..h - radius {
        for col in radius..w - radius {
            let mut num_plus = 0usize;
            let mut num_minus = 0usize;
            for dir in 0..8 {
                let (zenith, nadir) = zenith_nadir(field, row, col, dir, radius);
                let sum = zenith + nadir;
                if sum > flat_deg {
                    num_plus += 1;
                } else if sum < -flat_deg {
                    num_minus += 1;
                }
            }
            let code = REFERENCE_FORMS[num_minus][num_plus];
            assert_ne!(code, 0, "infeasible count pair at ({row}, {col})");
            out[row * w + col] = REFERENCE_TO_CANONICAL[code as usize];
        }
    }
    out
}

/// Is some direction of this cell within `eps` degrees of the flatness
/// threshold? Such ties are the only place implementations may diverge.
pub fn is_tie_cell(field: &HeightField, row: usize, col: usize, radius: usize, flat_deg: f64, eps: f64) -> bool {
    (0..8).any(|dir| {
        let (zenith, nadir) = zenith_nadir(field, row, col, dir, radius);
        ((zenith + nadir).abs() - flat_deg).abs() <= eps
    })
}

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The three checked-in parity fixtures (DEM file stem, search radius,
/// flatness threshold).
pub const PARITY_FIXTURES: [(&str, usize, f64); 3] = [
    ("parity_fbm", 2, 1.0),
    ("parity_eroded", 2, 1.0),
    ("parity_waves", 3, 1.0),
];

/// Analytic ridge-and-valley fixture surface.
pub fn waves_field() -> HeightField {
    HeightField::from_fn(64, 64, 200.0, |row, col| {
        let x = col as f64 / 9.0;
        let y = row as f64 / 7.0;
        180.0 * (x.sin() * y.cos()) + 35.0 * ((x * 2.3).cos() + (y * 1.7).sin())
    })
    .unwrap()
}
