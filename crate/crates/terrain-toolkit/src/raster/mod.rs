//! Digital elevation model rasters: loading, saving, resampling, void
//! filling, and hillshade previews.
//!
//! A [`HeightField`] is a row-major grid of elevations in meters with a
//! per-cell void mask (true = no data). Row 0 is the northernmost row,
//! matching the SRTM tile convention.

use std::path::Path;

use crate::error::{Result, TerrainError};

mod esri_ascii;
mod hgt;
mod pgm;

pub use pgm::GrayRaster;

/// Default cell size in meters after resampling to the working resolution.
pub const DEFAULT_CELL_SIZE_M: f64 = 200.0;

/// Default working resolution in cells per side.
pub const WORKING_RESOLUTION: usize = 512;

/// On-disk DEM formats understood by [`load_dem`] and [`save_dem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemFormat {
    /// SRTM .hgt tile: big-endian signed 16-bit, rows north to south,
    /// square grid inferred from file length, void sentinel -32768.
    SrtmHgt,
    /// ESRI ASCII grid (ncols/nrows/xllcorner/yllcorner/cellsize header).
    EsriAscii,
    /// Binary PGM (P5, maxval 65535, big-endian) with a JSON sidecar
    /// `<path>.json` holding the affine dequantization bounds.
    Pgm16,
}

impl DemFormat {
    /// Infer the format from a file extension (`hgt`, `asc`, `pgm`).
    pub fn from_extension(path: &Path) -> Option<DemFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "hgt" => Some(DemFormat::SrtmHgt),
            "asc" => Some(DemFormat::EsriAscii),
            "pgm" => Some(DemFormat::Pgm16),
            _ => None,
        }
    }
}

/// A 2D elevation raster with square cells.
///
/// Invariants, enforced at construction:
/// - `elevations.len() == width * height` (same for the void mask)
/// - `cell_size > 0` and finite
/// - every non-void elevation is finite
///
/// Void cells always store elevation 0.0 so that equality and file
/// round-trips are well defined. Values are immutable after construction;
/// operations return new fields.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    width: usize,
    height: usize,
    cell_size: f64,
    elevations: Vec<f64>,
    void_mask: Vec<bool>,
}

impl HeightField {
    pub fn new(
        width: usize,
        height: usize,
        cell_size: f64,
        elevations: Vec<f64>,
        void_mask: Vec<bool>,
    ) -> Result<HeightField> {
        if width == 0 || height == 0 {
            return Err(TerrainError::EmptyInput("zero-sized height field".into()));
        }
        if elevations.len() != width * height {
            return Err(TerrainError::InvalidParameter(format!(
                "elevation buffer holds {} samples, expected {}x{} = {}",
                elevations.len(),
                width,
                height,
                width * height
            )));
        }
        if void_mask.len() != width * height {
            return Err(TerrainError::InvalidParameter(format!(
                "void mask holds {} cells, expected {}",
                void_mask.len(),
                width * height
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(TerrainError::InvalidParameter(format!(
                "cell size must be a positive real, got {cell_size}"
            )));
        }
        let mut elevations = elevations;
        for (i, z) in elevations.iter_mut().enumerate() {
            if void_mask[i] {
                *z = 0.0;
            } else if !z.is_finite() {
                return Err(TerrainError::NonFinite(format!(
                    "elevation at cell ({}, {})",
                    i / width,
                    i % width
                )));
            }
        }
        Ok(HeightField {
            width,
            height,
            cell_size,
            elevations,
            void_mask,
        })
    }

    /// A void-free field with every cell at `value`.
    pub fn filled(width: usize, height: usize, cell_size: f64, value: f64) -> HeightField {
        HeightField::new(
            width,
            height,
            cell_size,
            vec![value; width * height],
            vec![false; width * height],
        )
        .expect("constant field satisfies invariants")
    }

    /// Build a void-free field from a closure of (row, col).
    pub fn from_fn(
        width: usize,
        height: usize,
        cell_size: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<HeightField> {
        let mut elevations = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                elevations.push(f(row, col));
            }
        }
        HeightField::new(
            width,
            height,
            cell_size,
            elevations,
            vec![false; width * height],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.elevations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elevations.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.elevations[row * self.width + col]
    }

    #[inline]
    pub fn is_void(&self, row: usize, col: usize) -> bool {
        self.void_mask[row * self.width + col]
    }

    pub fn elevations(&self) -> &[f64] {
        &self.elevations
    }

    pub fn void_mask(&self) -> &[bool] {
        &self.void_mask
    }

    pub fn void_count(&self) -> usize {
        self.void_mask.iter().filter(|&&v| v).count()
    }

    pub fn has_voids(&self) -> bool {
        self.void_mask.iter().any(|&v| v)
    }

    /// Min and max elevation over non-void cells, or None if all cells are void.
    pub fn min_max(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut any = false;
        for (i, &z) in self.elevations.iter().enumerate() {
            if !self.void_mask[i] {
                lo = lo.min(z);
                hi = hi.max(z);
                any = true;
            }
        }
        any.then_some((lo, hi))
    }

    /// New field with each non-void elevation transformed by `f`.
    pub fn map_elevations(&self, f: impl Fn(f64) -> f64) -> Result<HeightField> {
        let elevations = self
            .elevations
            .iter()
            .zip(&self.void_mask)
            .map(|(&z, &v)| if v { 0.0 } else { f(z) })
            .collect();
        HeightField::new(
            self.width,
            self.height,
            self.cell_size,
            elevations,
            self.void_mask.clone(),
        )
    }

    /// Same grid with a different cell size.
    pub fn with_cell_size(&self, cell_size: f64) -> Result<HeightField> {
        HeightField::new(
            self.width,
            self.height,
            cell_size,
            self.elevations.clone(),
            self.void_mask.clone(),
        )
    }
}

/// Load a DEM from disk in the declared format.
pub fn load_dem(path: &Path, format: DemFormat) -> Result<HeightField> {
    match format {
        DemFormat::SrtmHgt => hgt::load(path),
        DemFormat::EsriAscii => esri_ascii::load(path),
        DemFormat::Pgm16 => pgm::load_pgm16(path),
    }
}

/// Save a DEM to disk. HGT is a source format only and cannot be written.
pub fn save_dem(field: &HeightField, path: &Path, format: DemFormat) -> Result<()> {
    match format {
        DemFormat::SrtmHgt => Err(TerrainError::InvalidParameter(
            "srtm_hgt is read-only; save as esri_ascii or pgm16".into(),
        )),
        DemFormat::EsriAscii => esri_ascii::save(field, path),
        DemFormat::Pgm16 => pgm::save_pgm16(field, path),
    }
}

/// Fill void cells from their nearest non-void neighbor (8-connected grid
/// distance, deterministic scan order on ties). This is an explicit step:
/// classification and synthesis reject fields that still contain voids.
pub fn fill_voids(field: &HeightField) -> Result<HeightField> {
    if !field.has_voids() {
        return Ok(field.clone());
    }
    let (w, h) = (field.width, field.height);
    let n = w * h;
    let mut filled = field.elevations.clone();
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for (i, &void) in field.void_mask.iter().enumerate() {
        if !void {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    if queue.is_empty() {
        return Err(TerrainError::EmptyInput(
            "cannot fill a field that is entirely void".into(),
        ));
    }
    while let Some(i) = queue.pop_front() {
        let (row, col) = (i / w, i % w);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if dist[j] == u32::MAX {
                    dist[j] = dist[i] + 1;
                    filled[j] = filled[i];
                    queue.push_back(j);
                }
            }
        }
    }
    HeightField::new(w, h, field.cell_size, filled, vec![false; n])
}

/// Bilinear resampling to a square `target` x `target` grid.
///
/// The source grid is mapped corner-to-corner, which reproduces affine
/// surfaces exactly. The new cell size is `input_extent / target` where the
/// extent is the larger grid dimension times the source cell size. Output
/// cells whose footprint touches a void input cell become void.
pub fn resample(field: &HeightField, target: usize) -> Result<HeightField> {
    if target < 2 {
        return Err(TerrainError::InvalidParameter(format!(
            "resample target must be at least 2 cells per side, got {target}"
        )));
    }
    let (w, h) = (field.width, field.height);
    let sx = if w > 1 {
        (w - 1) as f64 / (target - 1) as f64
    } else {
        0.0
    };
    let sy = if h > 1 {
        (h - 1) as f64 / (target - 1) as f64
    } else {
        0.0
    };
    let extent = field.cell_size * w.max(h) as f64;
    let cell_size = extent / target as f64;
    // Footprint half-width in source cells; at least half a source cell so
    // upsampled outputs still see the stencil they interpolate from.
    let hx = sx.max(1.0) / 2.0;
    let hy = sy.max(1.0) / 2.0;

    let mut elevations = vec![0.0f64; target * target];
    let mut voids = vec![false; target * target];
    for out_row in 0..target {
        let y = out_row as f64 * sy;
        for out_col in 0..target {
            let x = out_col as f64 * sx;
            let idx = out_row * target + out_col;

            let r0 = ((y - hy).floor().max(0.0)) as usize;
            let r1 = ((y + hy).ceil() as usize).min(h - 1);
            let c0 = ((x - hx).floor().max(0.0)) as usize;
            let c1 = ((x + hx).ceil() as usize).min(w - 1);
            let touches_void = (r0..=r1)
                .any(|r| (c0..=c1).any(|c| field.void_mask[r * w + c]));
            if touches_void {
                voids[idx] = true;
                continue;
            }

            elevations[idx] = bilinear(field, x, y);
        }
    }
    HeightField::new(target, target, cell_size, elevations, voids)
}

fn bilinear(field: &HeightField, x: f64, y: f64) -> f64 {
    let (w, h) = (field.width, field.height);
    let c0 = (x.floor() as usize).min(w.saturating_sub(2));
    let r0 = (y.floor() as usize).min(h.saturating_sub(2));
    let c1 = (c0 + 1).min(w - 1);
    let r1 = (r0 + 1).min(h - 1);
    let fx = x - c0 as f64;
    let fy = y - r0 as f64;
    let z00 = field.get(r0, c0);
    let z01 = field.get(r0, c1);
    let z10 = field.get(r1, c0);
    let z11 = field.get(r1, c1);
    let top = z00 + (z01 - z00) * fx;
    let bottom = z10 + (z11 - z10) * fx;
    top + (bottom - top) * fy
}

/// Lambertian hillshade from central-difference surface normals.
///
/// `azimuth_deg` is measured clockwise from north, `altitude_deg` above the
/// horizon; the conventional cartographic light is (315, 45). Void cells
/// render as 0.
pub fn hillshade(field: &HeightField, azimuth_deg: f64, altitude_deg: f64) -> GrayRaster {
    let (w, h) = (field.width, field.height);
    let az = azimuth_deg.to_radians();
    let alt = altitude_deg.to_radians();
    // Light vector in (east, north, up) coordinates.
    let light = [az.sin() * alt.cos(), az.cos() * alt.cos(), alt.sin()];
    let cs = field.cell_size;

    let sample = |row: usize, col: usize, center: f64| -> f64 {
        if field.void_mask[row * w + col] {
            center
        } else {
            field.get(row, col)
        }
    };

    let mut pixels = vec![0u8; w * h];
    for row in 0..h {
        for col in 0..w {
            if field.void_mask[row * w + col] {
                continue;
            }
            let z = field.get(row, col);
            let e = sample(row, (col + 1).min(w - 1), z);
            let west = sample(row, col.saturating_sub(1), z);
            let north = sample(row.saturating_sub(1), col, z);
            let s = sample((row + 1).min(h - 1), col, z);
            let span_x = ((col + 1).min(w - 1) - col.saturating_sub(1)) as f64;
            let span_y = ((row + 1).min(h - 1) - row.saturating_sub(1)) as f64;
            let dz_de = if span_x > 0.0 { (e - west) / (span_x * cs) } else { 0.0 };
            // Row index grows southward, so the northward derivative flips sign.
            let dz_dn = if span_y > 0.0 { (north - s) / (span_y * cs) } else { 0.0 };
            let norm = (dz_de * dz_de + dz_dn * dz_dn + 1.0).sqrt();
            let normal = [-dz_de / norm, -dz_dn / norm, 1.0 / norm];
            let ndotl =
                normal[0] * light[0] + normal[1] * light[1] + normal[2] * light[2];
            pixels[row * w + col] = (255.0 * ndotl.max(0.0)).round().min(255.0) as u8;
        }
    }
    GrayRaster {
        width: w,
        height: h,
        pixels,
    }
}

#[cfg(test)]
mod tests;
