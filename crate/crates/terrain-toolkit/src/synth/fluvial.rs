//! Fluvial erosion with a virtual-pipe water model: rain, four-direction
//! flux routing, capacity-limited erosion and deposition, donor-cell
//! sediment transport, and evaporation. Water and sediment leave the
//! domain only at the border, where they are drained into a ledger, so
//! rock + suspended sediment + outflow is conserved.
//!
//! Coastal erosion runs the same pipeline with rain, erosion, and
//! deposition restricted to a band around sea level.

use rayon::prelude::*;

use crate::error::{Result, TerrainError};
use crate::raster::HeightField;

/// Rates of the virtual-pipe model. All are per-iteration quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluvialParams {
    pub iterations: u32,
    /// Water depth added per iteration (meters).
    pub rain_rate: f64,
    /// Sediment capacity per unit tilt times flow speed.
    pub capacity_k: f64,
    /// Fraction of the capacity deficit dissolved from the bed.
    pub dissolve_k: f64,
    /// Fraction of the capacity surplus settled back onto the bed.
    pub deposit_k: f64,
    /// Fraction of standing water removed per iteration.
    pub evaporation: f64,
}

impl FluvialParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rain_rate", self.rain_rate),
            ("capacity_k", self.capacity_k),
            ("dissolve_k", self.dissolve_k),
            ("deposit_k", self.deposit_k),
            ("evaporation", self.evaporation),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(TerrainError::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.dissolve_k > 1.0 || self.deposit_k > 1.0 || self.evaporation > 1.0 {
            return Err(TerrainError::InvalidParameter(
                "dissolve_k, deposit_k, and evaporation must not exceed 1".into(),
            ));
        }
        Ok(())
    }
}

/// Mass bookkeeping for one erosion run, all in summed meters of material.
#[derive(Debug, Clone, Copy)]
pub struct FluvialLedger {
    pub initial_rock: f64,
    pub final_rock: f64,
    pub final_suspended: f64,
    pub sediment_outflow: f64,
}

impl FluvialLedger {
    /// |initial - (rock + suspended + outflow)| relative to the initial total.
    pub fn relative_imbalance(&self) -> f64 {
        let tracked = self.final_rock + self.final_suspended + self.sediment_outflow;
        (self.initial_rock - tracked).abs() / self.initial_rock.abs().max(1.0)
    }
}

// Pipe directions: west, east, north, south. opposite(d) = d ^ 1.
const PIPE_DIRS: [(i64, i64); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

// Gain applied to the surface-height difference when charging a pipe.
// Values near 0.25 split a local mound across its four pipes in one step;
// the per-cell water limit keeps the scheme stable.
const FLUX_GAIN: f64 = 0.25;

// Tilt floor so transport capacity never stalls on perfectly flat beds.
const MIN_TILT: f64 = 0.005;

// Depth above which extra water stops raising capacity. Below the cap the
// product speed * depth makes capacity follow discharge, which is what
// lets converging flow incise channels instead of ponding.
const CAPACITY_DEPTH_CAP: f64 = 1.0;

struct PipeSim {
    w: usize,
    h: usize,
    cell: f64,
    bed: Vec<f64>,
    water: Vec<f64>,
    sediment: Vec<f64>,
    flux: Vec<[f64; 4]>,
    sed_flux: Vec<[f64; 4]>,
    outflow: f64,
}

impl PipeSim {
    fn new(field: &HeightField) -> PipeSim {
        let n = field.len();
        PipeSim {
            w: field.width(),
            h: field.height(),
            cell: field.cell_size(),
            bed: field.elevations().to_vec(),
            water: vec![0.0; n],
            sediment: vec![0.0; n],
            flux: vec![[0.0; 4]; n],
            sed_flux: vec![[0.0; 4]; n],
            outflow: 0.0,
        }
    }

    fn step(&mut self, p: &FluvialParams, mask: Option<&[bool]>) {
        let (w, h) = (self.w, self.h);
        let active = |i: usize| mask.is_none_or(|m| m[i]);

        // Rain.
        if p.rain_rate > 0.0 {
            self.water
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, wat)| {
                    if mask.is_none_or(|m| m[i]) {
                        *wat += p.rain_rate;
                    }
                });
        }
        let water_pre = self.water.clone();

        // Charge pipes from surface-height differences, limited so a cell
        // cannot push out more water than it holds.
        let bed = &self.bed;
        let water = &self.water;
        let sim_w = w;
        let sim_h = h;
        self.flux
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(row, flux_row)| {
                for (col, f) in flux_row.iter_mut().enumerate() {
                    let i = row * sim_w + col;
                    let surface = bed[i] + water[i];
                    let mut total = 0.0;
                    for (d, &(dr, dc)) in PIPE_DIRS.iter().enumerate() {
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= sim_h as i64 || nc >= sim_w as i64 {
                            f[d] = 0.0;
                            continue;
                        }
                        let j = nr as usize * sim_w + nc as usize;
                        let dh = surface - (bed[j] + water[j]);
                        f[d] = (f[d] + FLUX_GAIN * dh).max(0.0);
                        total += f[d];
                    }
                    if total > water[i] && total > 0.0 {
                        let scale = water[i] / total;
                        for fd in f.iter_mut() {
                            *fd *= scale;
                        }
                    }
                }
            });

        // Move water.
        let flux = &self.flux;
        let mut water_post = vec![0.0f64; w * h];
        water_post
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(row, out_row)| {
                for (col, out) in out_row.iter_mut().enumerate() {
                    let i = row * sim_w + col;
                    let mut wt = water_pre[i] - flux[i].iter().sum::<f64>();
                    for d in 0..4 {
                        let (dr, dc) = PIPE_DIRS[d];
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= sim_h as i64 || nc >= sim_w as i64 {
                            continue;
                        }
                        wt += flux[nr as usize * sim_w + nc as usize][d ^ 1];
                    }
                    *out = wt;
                }
            });

        // Erode or deposit against transport capacity.
        let cell = self.cell;
        let sediment = &self.sediment;
        let mut bed_next = vec![0.0f64; w * h];
        let mut sed_mid = vec![0.0f64; w * h];
        bed_next
            .par_chunks_mut(w)
            .zip(sed_mid.par_chunks_mut(w))
            .enumerate()
            .for_each(|(row, (bed_row, sed_row))| {
                for col in 0..sim_w {
                    let i = row * sim_w + col;
                    if !mask.is_none_or(|m| m[i]) {
                        bed_row[col] = bed[i];
                        sed_row[col] = sediment[i];
                        continue;
                    }
                    // Net throughflow per axis, in depth times cells.
                    let inflow = |dir: usize| -> f64 {
                        let (dr, dc) = PIPE_DIRS[dir];
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= sim_h as i64 || nc >= sim_w as i64 {
                            0.0
                        } else {
                            flux[nr as usize * sim_w + nc as usize][dir ^ 1]
                        }
                    };
                    let u = (flux[i][1] - flux[i][0] + inflow(0) - inflow(1)) / 2.0;
                    let v = (flux[i][3] - flux[i][2] + inflow(2) - inflow(3)) / 2.0;
                    let mean_depth = (water_pre[i] + water_post[i]) / 2.0;
                    let speed = (u * u + v * v).sqrt() / (mean_depth + 1e-8);

                    let grad = |a: usize, b: usize, span: f64| (bed[a] - bed[b]) / span;
                    let east = self_neighbor(sim_w, sim_h, row, col, 1).unwrap_or(i);
                    let west = self_neighbor(sim_w, sim_h, row, col, 0).unwrap_or(i);
                    let south = self_neighbor(sim_w, sim_h, row, col, 3).unwrap_or(i);
                    let north = self_neighbor(sim_w, sim_h, row, col, 2).unwrap_or(i);
                    let span_x = if east != i && west != i { 2.0 } else { 1.0 };
                    let span_y = if south != i && north != i { 2.0 } else { 1.0 };
                    let gx = grad(east, west, span_x * cell);
                    let gy = grad(south, north, span_y * cell);
                    let slope = (gx * gx + gy * gy).sqrt();
                    let tilt = (slope / (1.0 + slope * slope).sqrt()).max(MIN_TILT);

                    let capacity =
                        p.capacity_k * tilt * speed * mean_depth.min(CAPACITY_DEPTH_CAP);
                    let s = sediment[i];
                    if capacity > s {
                        let amt = p.dissolve_k * (capacity - s);
                        if amt > 0.0 {
                            bed_row[col] = bed[i] - amt;
                            sed_row[col] = s + amt;
                        } else {
                            bed_row[col] = bed[i];
                            sed_row[col] = s;
                        }
                    } else {
                        let amt = p.deposit_k * (s - capacity);
                        if amt > 0.0 {
                            bed_row[col] = bed[i] + amt;
                            sed_row[col] = s - amt;
                        } else {
                            bed_row[col] = bed[i];
                            sed_row[col] = s;
                        }
                    }
                }
            });

        // Donor-cell sediment transport: suspended load leaves with the
        // same fraction of water each pipe carried.
        let sed_mid_ref = &sed_mid;
        self.sed_flux
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, sf)| {
                *sf = [0.0; 4];
                let wp = water_pre[i];
                if wp > 0.0 {
                    let s = sed_mid_ref[i];
                    for d in 0..4 {
                        sf[d] = s * (flux[i][d] / wp);
                    }
                }
            });
        let sed_flux = &self.sed_flux;
        let mut sed_next = vec![0.0f64; w * h];
        sed_next
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(row, out_row)| {
                for (col, out) in out_row.iter_mut().enumerate() {
                    let i = row * sim_w + col;
                    let mut s = sed_mid_ref[i] - sed_flux[i].iter().sum::<f64>();
                    for d in 0..4 {
                        let (dr, dc) = PIPE_DIRS[d];
                        let (nr, nc) = (row as i64 + dr, col as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= sim_h as i64 || nc >= sim_w as i64 {
                            continue;
                        }
                        s += sed_flux[nr as usize * sim_w + nc as usize][d ^ 1];
                    }
                    *out = s;
                }
            });

        // Drain the border: water and its suspended load exit the domain.
        for row in 0..h {
            for col in 0..w {
                if row != 0 && row != h - 1 && col != 0 && col != w - 1 {
                    continue;
                }
                let i = row * w + col;
                if !active(i) {
                    continue;
                }
                self.outflow += sed_next[i];
                sed_next[i] = 0.0;
                water_post[i] = 0.0;
                self.flux[i] = [0.0; 4];
            }
        }

        // Evaporation.
        if p.evaporation > 0.0 {
            let keep = 1.0 - p.evaporation;
            water_post.par_iter_mut().for_each(|wt| *wt *= keep);
        }

        self.bed = bed_next;
        self.sediment = sed_next;
        self.water = water_post;
    }

    fn check_finite(&self, iteration: u32) -> Result<()> {
        for (name, buf) in [
            ("bed", &self.bed),
            ("water", &self.water),
            ("sediment", &self.sediment),
        ] {
            if let Some(pos) = buf.iter().position(|v| !v.is_finite()) {
                return Err(TerrainError::Unstable(format!(
                    "non-finite {name} at cell ({}, {}) after iteration {iteration}; \
                     reduce rates or rain",
                    pos / self.w,
                    pos % self.w
                )));
            }
        }
        Ok(())
    }
}

#[inline]
fn self_neighbor(w: usize, h: usize, row: usize, col: usize, dir: usize) -> Option<usize> {
    let (dr, dc) = PIPE_DIRS[dir];
    let (nr, nc) = (row as i64 + dr, col as i64 + dc);
    if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
        None
    } else {
        Some(nr as usize * w + nc as usize)
    }
}

fn run(
    field: &HeightField,
    params: &FluvialParams,
    mask: Option<&[bool]>,
) -> Result<(HeightField, FluvialLedger)> {
    params.validate()?;
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }
    let mut sim = PipeSim::new(field);
    let initial_rock: f64 = sim.bed.iter().sum();
    for iteration in 0..params.iterations {
        sim.step(params, mask);
        sim.check_finite(iteration)?;
    }
    let ledger = FluvialLedger {
        initial_rock,
        final_rock: sim.bed.iter().sum(),
        final_suspended: sim.sediment.iter().sum(),
        sediment_outflow: sim.outflow,
    };
    let out = HeightField::new(
        field.width(),
        field.height(),
        field.cell_size(),
        sim.bed,
        vec![false; field.len()],
    )?;
    Ok((out, ledger))
}

/// Fluvial erosion over the whole field.
pub fn erode_fluvial(field: &HeightField, params: &FluvialParams) -> Result<HeightField> {
    Ok(run(field, params, None)?.0)
}

/// Fluvial erosion returning the mass ledger alongside the terrain.
pub fn erode_fluvial_ledger(
    field: &HeightField,
    params: &FluvialParams,
) -> Result<(HeightField, FluvialLedger)> {
    run(field, params, None)
}

/// Sea level implied by a fraction of the field's elevation range.
pub fn sea_level(field: &HeightField, fraction: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(TerrainError::InvalidParameter(format!(
            "sea level fraction must be in [0, 1], got {fraction}"
        )));
    }
    let (lo, hi) = field
        .min_max()
        .ok_or_else(|| TerrainError::EmptyInput("all-void field".into()))?;
    Ok(lo + fraction * (hi - lo))
}

/// Hydraulic erosion restricted to a coastal band.
///
/// Rain, erosion, and deposition apply only to cells within `band_m`
/// meters of the sea level implied by `sea_level_fraction`; every other
/// cell of the output is bit-identical to the input.
pub fn erode_coastal(
    field: &HeightField,
    sea_level_fraction: f64,
    band_m: f64,
    params: &FluvialParams,
) -> Result<HeightField> {
    if !(band_m >= 0.0 && band_m.is_finite()) {
        return Err(TerrainError::InvalidParameter(format!(
            "band must be non-negative, got {band_m}"
        )));
    }
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }
    let sea = sea_level(field, sea_level_fraction)?;
    // Strict comparison: a zero band selects nothing.
    let mask: Vec<bool> = field
        .elevations()
        .iter()
        .map(|&z| (z - sea).abs() < band_m)
        .collect();
    if !mask.iter().any(|&m| m) {
        return Ok(field.clone());
    }
    Ok(run(field, params, Some(&mask))?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_params(iterations: u32) -> FluvialParams {
        FluvialParams {
            iterations,
            rain_rate: 0.01,
            capacity_k: 40.0,
            dissolve_k: 0.25,
            deposit_k: 0.25,
            evaporation: 0.02,
        }
    }

    fn cone(size: usize, peak: f64) -> HeightField {
        let mid = (size / 2) as f64;
        HeightField::from_fn(size, size, 100.0, |row, col| {
            let dr = row as f64 - mid;
            let dc = col as f64 - mid;
            (peak - (dr * dr + dc * dc).sqrt() * 25.0).max(0.0)
        })
        .unwrap()
    }

    #[test]
    fn rejects_negative_rates() {
        let field = HeightField::filled(8, 8, 100.0, 0.0);
        let mut p = default_params(1);
        p.rain_rate = -1.0;
        assert!(erode_fluvial(&field, &p).is_err());
        let mut p = default_params(1);
        p.dissolve_k = 1.5;
        assert!(erode_fluvial(&field, &p).is_err());
    }

    #[test]
    fn zero_rain_leaves_field_bit_identical() {
        let field = cone(33, 400.0);
        let mut p = default_params(50);
        p.rain_rate = 0.0;
        let out = erode_fluvial(&field, &p).unwrap();
        assert_eq!(out.elevations(), field.elevations());
    }

    #[test]
    fn ledger_balances_rock_sediment_and_outflow() {
        let field = cone(65, 800.0);
        let (out, ledger) = erode_fluvial_ledger(&field, &default_params(120)).unwrap();
        assert!(
            ledger.relative_imbalance() < 1e-6,
            "imbalance {}",
            ledger.relative_imbalance()
        );
        // Something actually happened.
        assert_ne!(out.elevations(), field.elevations());
        assert!(ledger.sediment_outflow > 0.0);
    }

    #[test]
    fn sea_level_interpolates_the_range() {
        let field = HeightField::from_fn(8, 8, 100.0, |row, _| row as f64 * 100.0).unwrap();
        assert_eq!(sea_level(&field, 0.0).unwrap(), 0.0);
        assert_eq!(sea_level(&field, 1.0).unwrap(), 700.0);
        assert_eq!(sea_level(&field, 0.5).unwrap(), 350.0);
        assert!(sea_level(&field, 1.5).is_err());
    }

    #[test]
    fn coastal_zero_band_is_identity() {
        let field = cone(33, 500.0);
        let out = erode_coastal(&field, 0.4, 0.0, &default_params(40)).unwrap();
        assert_eq!(out.elevations(), field.elevations());
    }

    #[test]
    fn coastal_leaves_cells_outside_band_untouched() {
        let field = cone(49, 600.0);
        let sea = sea_level(&field, 0.3).unwrap();
        let band = 80.0;
        let out = erode_coastal(&field, 0.3, band, &default_params(60)).unwrap();
        let mut changed_in_band = 0usize;
        for (i, (&before, &after)) in field
            .elevations()
            .iter()
            .zip(out.elevations())
            .enumerate()
        {
            if (before - sea).abs() > band {
                assert_eq!(
                    before.to_bits(),
                    after.to_bits(),
                    "cell {i} outside the band changed"
                );
            } else if before != after {
                changed_in_band += 1;
            }
        }
        assert!(changed_in_band > 0, "the band should erode");
    }

    #[test]
    fn island_shoreline_mean_elevation_decreases() {
        // A noisy island: shoreline cells should lose material on average.
        let field = HeightField::from_fn(65, 65, 100.0, |row, col| {
            let dr = (row as f64 - 32.0) / 32.0;
            let dc = (col as f64 - 32.0) / 32.0;
            let r2 = dr * dr + dc * dc;
            let ripple = ((row * 7 + col * 13) % 11) as f64 * 2.0;
            600.0 * (1.0 - r2).max(0.0) + ripple
        })
        .unwrap();
        let frac = 0.35;
        let band = 60.0;
        let sea = sea_level(&field, frac).unwrap();
        let out = erode_coastal(&field, frac, band, &default_params(150)).unwrap();
        let shoreline: Vec<usize> = field
            .elevations()
            .iter()
            .enumerate()
            .filter(|(_, &z)| (z - sea).abs() <= band)
            .map(|(i, _)| i)
            .collect();
        assert!(!shoreline.is_empty());
        let mean = |field: &HeightField| -> f64 {
            shoreline.iter().map(|&i| field.elevations()[i]).sum::<f64>() / shoreline.len() as f64
        };
        assert!(
            mean(&out) < mean(&field),
            "shoreline mean did not decrease: {} -> {}",
            mean(&field),
            mean(&out)
        );
    }
}
