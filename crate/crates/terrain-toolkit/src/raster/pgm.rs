//! Binary PGM rasters: 16-bit quantized DEMs with a JSON sidecar, and the
//! 8-bit grayscale rasters used for hillshade previews and landform maps.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};
use crate::raster::{HeightField, DEFAULT_CELL_SIZE_M};

/// An 8-bit single-channel raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayRaster {
    /// Write as binary PGM (P5, maxval 255).
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        std::fs::write(path, out).map_err(|e| TerrainError::io(path, e))
    }

    pub fn read_pgm(path: &Path) -> Result<GrayRaster> {
        let bytes = std::fs::read(path).map_err(|e| TerrainError::io(path, e))?;
        let (width, height, maxval, data) = parse_pgm(&bytes, path)?;
        if maxval > 255 {
            return Err(TerrainError::format(
                "pgm",
                path,
                format!("expected 8-bit maxval, got {maxval}"),
            ));
        }
        if data.len() != width * height {
            return Err(TerrainError::format("pgm", path, "truncated pixel data"));
        }
        Ok(GrayRaster {
            width,
            height,
            pixels: data.to_vec(),
        })
    }
}

/// Dequantization bounds stored next to a 16-bit PGM DEM.
#[derive(Debug, Serialize, Deserialize)]
struct Pgm16Sidecar {
    min_m: f64,
    max_m: f64,
    #[serde(default = "default_cell_size")]
    cell_size_m: f64,
}

fn default_cell_size() -> f64 {
    DEFAULT_CELL_SIZE_M
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

/// Save a DEM as P5 maxval-65535 big-endian PGM, affinely quantized to
/// 0..65535, with bounds recorded in `<path>.json`. Void masks cannot be
/// represented in PGM, so fields with voids are rejected.
pub fn save_pgm16(field: &HeightField, path: &Path) -> Result<()> {
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }
    let (min, max) = field.min_max().expect("void-free field has extrema");
    if !min.is_finite() || !max.is_finite() {
        return Err(TerrainError::NonFinite("elevation during save".into()));
    }
    let range = max - min;
    let mut out = format!("P5\n{} {}\n65535\n", field.width(), field.height()).into_bytes();
    out.reserve(field.len() * 2);
    for &z in field.elevations() {
        let q = if range > 0.0 {
            ((z - min) / range * 65535.0).round() as u16
        } else {
            0
        };
        out.extend_from_slice(&q.to_be_bytes());
    }
    std::fs::write(path, out).map_err(|e| TerrainError::io(path, e))?;

    let sidecar = Pgm16Sidecar {
        min_m: min,
        max_m: max,
        cell_size_m: field.cell_size(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    let sc_path = sidecar_path(path);
    std::fs::write(&sc_path, json).map_err(|e| TerrainError::io(&sc_path, e))
}

pub fn load_pgm16(path: &Path) -> Result<HeightField> {
    let bytes = std::fs::read(path).map_err(|e| TerrainError::io(path, e))?;
    let (width, height, maxval, data) = parse_pgm(&bytes, path)?;
    if maxval != 65535 {
        return Err(TerrainError::format(
            "pgm16",
            path,
            format!("expected maxval 65535, got {maxval}"),
        ));
    }
    if data.len() != width * height * 2 {
        return Err(TerrainError::format("pgm16", path, "truncated pixel data"));
    }

    let sc_path = sidecar_path(path);
    let sc_text =
        std::fs::read_to_string(&sc_path).map_err(|e| TerrainError::io(&sc_path, e))?;
    let sidecar: Pgm16Sidecar = serde_json::from_str(&sc_text).map_err(|e| {
        TerrainError::format("pgm16", &sc_path, format!("bad sidecar: {e}"))
    })?;
    if !sidecar.min_m.is_finite() || !sidecar.max_m.is_finite() || sidecar.max_m < sidecar.min_m {
        return Err(TerrainError::format("pgm16", &sc_path, "bad sidecar bounds"));
    }

    let range = sidecar.max_m - sidecar.min_m;
    let elevations = data
        .chunks_exact(2)
        .map(|pair| {
            let q = u16::from_be_bytes([pair[0], pair[1]]) as f64;
            sidecar.min_m + q / 65535.0 * range
        })
        .collect();
    HeightField::new(
        width,
        height,
        sidecar.cell_size_m,
        elevations,
        vec![false; width * height],
    )
}

/// Parse a P5 header and return (width, height, maxval, pixel bytes).
fn parse_pgm<'a>(bytes: &'a [u8], path: &Path) -> Result<(usize, usize, u32, &'a [u8])> {
    let bad = |reason: &str| TerrainError::format("pgm", path, reason.to_string());
    if !bytes.starts_with(b"P5") {
        return Err(bad("missing P5 magic"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Skip whitespace and '#' comment lines between header fields.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("malformed header"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("digits are utf8");
        *field = text.parse().map_err(|_| bad("header field out of range"))?;
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing separator after maxval"));
    }
    pos += 1;
    let (width, height, maxval) = (fields[0], fields[1], fields[2] as u32);
    if width == 0 || height == 0 {
        return Err(bad("zero dimension"));
    }
    Ok((width, height, maxval, &bytes[pos..]))
}
