//! SRTM .hgt tile reader.
//!
//! Tiles are headerless big-endian signed 16-bit meters, rows north to
//! south, on a square grid whose side is inferred from the file length.
//! The sentinel -32768 marks voids.

use std::path::Path;

use crate::error::{Result, TerrainError};
use crate::raster::HeightField;

const VOID_SENTINEL: i16 = -32768;

/// Cell size assigned to a freshly loaded tile. SRTM 3 arc-second data is
/// roughly 90 m per cell at the equator; the 3601-per-side 1 arc-second
/// tiles are roughly 30 m.
fn cell_size_for_side(side: usize) -> f64 {
    if side == 3601 {
        30.0
    } else {
        90.0
    }
}

pub fn load(path: &Path) -> Result<HeightField> {
    let bytes = std::fs::read(path).map_err(|e| TerrainError::io(path, e))?;
    if bytes.is_empty() || bytes.len() % 2 != 0 {
        return Err(TerrainError::format(
            "srtm_hgt",
            path,
            format!("length {} is not a whole number of 16-bit samples", bytes.len()),
        ));
    }
    let samples = bytes.len() / 2;
    let side = (samples as f64).sqrt().round() as usize;
    if side < 2 || side * side != samples {
        return Err(TerrainError::format(
            "srtm_hgt",
            path,
            format!("{samples} samples do not form a square grid"),
        ));
    }

    let mut elevations = Vec::with_capacity(samples);
    let mut voids = Vec::with_capacity(samples);
    for pair in bytes.chunks_exact(2) {
        let raw = i16::from_be_bytes([pair[0], pair[1]]);
        if raw == VOID_SENTINEL {
            elevations.push(0.0);
            voids.push(true);
        } else {
            elevations.push(raw as f64);
            voids.push(false);
        }
    }
    HeightField::new(side, side, cell_size_for_side(side), elevations, voids)
}
