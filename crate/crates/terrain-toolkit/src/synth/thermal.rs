//! Thermal erosion: talus-angle repose relaxation with double-buffered
//! (Jacobi) updates and a closed boundary, so total material is conserved.

use rayon::prelude::*;

use crate::error::{Result, TerrainError};
use crate::raster::HeightField;

// 8-neighborhood with horizontal distance multipliers.
const NEIGHBORS: [(i64, i64, f64); 8] = [
    (-1, 0, 1.0),
    (-1, 1, std::f64::consts::SQRT_2),
    (0, 1, 1.0),
    (1, 1, std::f64::consts::SQRT_2),
    (1, 0, 1.0),
    (1, -1, std::f64::consts::SQRT_2),
    (0, -1, 1.0),
    (-1, -1, std::f64::consts::SQRT_2),
];

/// Relax slopes steeper than the talus angle.
///
/// Per iteration, each cell whose drop to some lower neighbor exceeds the
/// talus slope sheds `rate` times its largest excess, split among the
/// qualifying neighbors in proportion to their excess. Updates read the
/// previous iteration only, so the result is independent of traversal or
/// worker order, and no material crosses the boundary.
pub fn erode_thermal(
    field: &HeightField,
    talus_deg: f64,
    iterations: u32,
    rate: f64,
) -> Result<HeightField> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(TerrainError::InvalidParameter(format!(
            "thermal rate must be in (0, 1], got {rate}"
        )));
    }
    if !(talus_deg > 0.0 && talus_deg < 90.0) {
        return Err(TerrainError::InvalidParameter(format!(
            "talus angle must be in (0, 90) degrees, got {talus_deg}"
        )));
    }
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }

    let (w, h) = (field.width(), field.height());
    let n = w * h;
    let tan_talus = talus_deg.to_radians().tan();
    let cell = field.cell_size();

    let mut current = field.elevations().to_vec();
    let mut outgoing: Vec<[f64; 8]> = vec![[0.0; 8]; n];

    for _ in 0..iterations {
        // Phase 1: per-cell outgoing transfers from the frozen snapshot.
        outgoing
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(row, out_row)| {
                for (col, out) in out_row.iter_mut().enumerate() {
                    *out = [0.0; 8];
                    let z = current[row * w + col];
                    let mut excess = [0.0f64; 8];
                    let mut total_excess = 0.0;
                    let mut max_excess = 0.0f64;
                    for (d, &(dr, dc, mult)) in NEIGHBORS.iter().enumerate() {
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                            continue;
                        }
                        let dz = z - current[nr as usize * w + nc as usize];
                        let e = dz - cell * mult * tan_talus;
                        if e > 0.0 {
                            excess[d] = e;
                            total_excess += e;
                            max_excess = max_excess.max(e);
                        }
                    }
                    if total_excess > 0.0 {
                        let moved = rate * max_excess;
                        for d in 0..8 {
                            out[d] = moved * excess[d] / total_excess;
                        }
                    }
                }
            });

        // Phase 2: gather. Every transfer is subtracted from its source and
        // added to its destination from the same stored value.
        let snapshot = current.clone();
        current
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(row, row_cells)| {
                for (col, cell_z) in row_cells.iter_mut().enumerate() {
                    let i = row * w + col;
                    let mut z = snapshot[i];
                    for (d, &(dr, dc, _)) in NEIGHBORS.iter().enumerate() {
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                            continue;
                        }
                        z -= outgoing[i][d];
                        // Inflow arrives along the opposite ray of the neighbor.
                        z += outgoing[nr as usize * w + nc as usize][(d + 4) % 8];
                    }
                    *cell_z = z;
                }
            });
    }

    HeightField::new(w, h, cell, current, vec![false; n])
}

/// Steepest 8-neighbor slope angle in degrees anywhere on the field.
pub fn max_slope_deg(field: &HeightField) -> f64 {
    let (w, h) = (field.width(), field.height());
    let cell = field.cell_size();
    let mut max_tan = 0.0f64;
    for row in 0..h {
        for col in 0..w {
            let z = field.get(row, col);
            for &(dr, dc, mult) in &NEIGHBORS {
                let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let dz = (z - field.get(nr as usize, nc as usize)).abs();
                max_tan = max_tan.max(dz / (cell * mult));
            }
        }
    }
    max_tan.atan().to_degrees()
}
