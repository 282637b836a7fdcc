//! ESRI ASCII grid reader/writer.
//!
//! Header keys (case-insensitive): ncols, nrows, xllcorner, yllcorner,
//! cellsize, and an optional NODATA_value. Values follow row-major, north
//! to south. Elevations are printed with Rust's shortest round-trip float
//! formatting, so save followed by load is the identity.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, TerrainError};
use crate::raster::HeightField;

const DEFAULT_NODATA: f64 = -9999.0;

pub fn load(path: &Path) -> Result<HeightField> {
    let text = std::fs::read_to_string(path).map_err(|e| TerrainError::io(path, e))?;
    let bad = |reason: String| TerrainError::format("esri_ascii", path, reason);

    let mut tokens = text.split_whitespace();
    let mut ncols: Option<usize> = None;
    let mut nrows: Option<usize> = None;
    let mut cellsize: Option<f64> = None;
    let mut nodata: Option<f64> = None;
    let mut first_value: Option<&str> = None;

    // Header entries come as "key value" token pairs until the first bare number.
    while let Some(tok) = tokens.next() {
        let key = tok.to_ascii_lowercase();
        let known = matches!(
            key.as_str(),
            "ncols" | "nrows" | "xllcorner" | "yllcorner" | "cellsize" | "nodata_value"
        );
        if !known {
            first_value = Some(tok);
            break;
        }
        let value = tokens
            .next()
            .ok_or_else(|| bad(format!("header key {key} has no value")))?;
        match key.as_str() {
            "ncols" => {
                ncols = Some(value.parse().map_err(|_| bad(format!("bad ncols {value}")))?)
            }
            "nrows" => {
                nrows = Some(value.parse().map_err(|_| bad(format!("bad nrows {value}")))?)
            }
            "cellsize" => {
                cellsize =
                    Some(value.parse().map_err(|_| bad(format!("bad cellsize {value}")))?)
            }
            "nodata_value" => {
                nodata = Some(
                    value
                        .parse()
                        .map_err(|_| bad(format!("NODATA parse failure: {value}")))?,
                )
            }
            // Corner coordinates are read and discarded; the toolkit does
            // not track georeferencing.
            _ => {}
        }
    }

    let ncols = ncols.ok_or_else(|| bad("missing ncols".into()))?;
    let nrows = nrows.ok_or_else(|| bad("missing nrows".into()))?;
    let cellsize = cellsize.ok_or_else(|| bad("missing cellsize".into()))?;
    if ncols == 0 || nrows == 0 {
        return Err(bad("ncols and nrows must be positive".into()));
    }

    let expected = ncols * nrows;
    let mut elevations = Vec::with_capacity(expected);
    let mut voids = Vec::with_capacity(expected);
    let mut push = |tok: &str| -> Result<()> {
        let value: f64 = tok
            .parse()
            .map_err(|_| bad(format!("bad elevation token {tok}")))?;
        if nodata.is_some() && value == nodata.unwrap() {
            elevations.push(0.0);
            voids.push(true);
        } else if value.is_finite() {
            elevations.push(value);
            voids.push(false);
        } else {
            return Err(bad(format!("non-finite elevation token {tok}")));
        }
        Ok(())
    };
    if let Some(tok) = first_value {
        push(tok)?;
    }
    for tok in tokens {
        push(tok)?;
    }
    if elevations.len() != expected {
        return Err(bad(format!(
            "expected {expected} values, found {}",
            elevations.len()
        )));
    }
    HeightField::new(ncols, nrows, cellsize, elevations, voids)
}

pub fn save(field: &HeightField, path: &Path) -> Result<()> {
    let has_voids = field.has_voids();
    if has_voids {
        // A real elevation equal to the sentinel would turn into a void on
        // reload, silently corrupting the round trip.
        let clash = field
            .elevations()
            .iter()
            .zip(field.void_mask())
            .any(|(&z, &v)| !v && z == DEFAULT_NODATA);
        if clash {
            return Err(TerrainError::InvalidParameter(format!(
                "field contains a real elevation equal to the NODATA sentinel {DEFAULT_NODATA}"
            )));
        }
    }
    for (&z, &v) in field.elevations().iter().zip(field.void_mask()) {
        if !v && !z.is_finite() {
            return Err(TerrainError::NonFinite("elevation during save".into()));
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "ncols {}", field.width());
    let _ = writeln!(out, "nrows {}", field.height());
    let _ = writeln!(out, "xllcorner 0");
    let _ = writeln!(out, "yllcorner 0");
    let _ = writeln!(out, "cellsize {}", field.cell_size());
    if has_voids {
        let _ = writeln!(out, "NODATA_value {}", DEFAULT_NODATA);
    }
    for row in 0..field.height() {
        for col in 0..field.width() {
            if col > 0 {
                out.push(' ');
            }
            if field.is_void(row, col) {
                let _ = write!(out, "{}", DEFAULT_NODATA);
            } else {
                let _ = write!(out, "{}", field.get(row, col));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| TerrainError::io(path, e))
}
