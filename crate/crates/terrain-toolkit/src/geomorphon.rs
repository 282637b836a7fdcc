//! Geomorphon landform classification.
//!
//! Every DEM cell is described by an 8-direction ternary pattern: along each
//! compass ray of up to `search_radius_cells` cells, the highest and lowest
//! line-of-sight elevation angles are reduced to one of {-1, 0, +1} by a
//! flatness threshold. The (count of -1, count of +1) pair indexes a fixed
//! decision table of ten landform classes.
//!
//! Classes are kept in a canonical order shared with the realism metric's
//! weight vector: depression, summit, flat, valley, ridge, hollow, spur,
//! shoulder, slope, footslope (ascending typical coverage).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};
use crate::raster::{GrayRaster, HeightField};

/// Number of landform classes.
pub const CLASS_COUNT: usize = 10;

/// Raster index reserved for unclassified border-margin cells in map exports.
pub const UNCLASSIFIED_INDEX: u8 = 255;

/// Search radius and flatness threshold of the ternary-pattern operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomorphonParams {
    /// Line-of-sight length in cells (L >= 1). At the default 200 m working
    /// cell size, L = 2 spans roughly 800 m across the pattern.
    pub search_radius_cells: usize,
    /// Flatness threshold t in degrees, 0 <= t < 90.
    pub flatness_deg: f64,
}

impl Default for GeomorphonParams {
    fn default() -> Self {
        GeomorphonParams {
            search_radius_cells: 2,
            flatness_deg: 1.0,
        }
    }
}

impl GeomorphonParams {
    pub fn new(search_radius_cells: usize, flatness_deg: f64) -> Result<GeomorphonParams> {
        let p = GeomorphonParams {
            search_radius_cells,
            flatness_deg,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.search_radius_cells < 1 {
            return Err(TerrainError::InvalidParameter(
                "search radius must be at least 1 cell".into(),
            ));
        }
        if !(0.0..90.0).contains(&self.flatness_deg) {
            return Err(TerrainError::InvalidParameter(format!(
                "flatness threshold must be in [0, 90) degrees, got {}",
                self.flatness_deg
            )));
        }
        Ok(())
    }
}

/// The ten landform classes in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum GeomorphonClass {
    Depression = 0,
    Summit = 1,
    Flat = 2,
    Valley = 3,
    Ridge = 4,
    Hollow = 5,
    Spur = 6,
    Shoulder = 7,
    Slope = 8,
    Footslope = 9,
}

use GeomorphonClass::*;

impl GeomorphonClass {
    pub const ALL: [GeomorphonClass; CLASS_COUNT] = [
        Depression, Summit, Flat, Valley, Ridge, Hollow, Spur, Shoulder, Slope, Footslope,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: u8) -> Option<GeomorphonClass> {
        GeomorphonClass::ALL.get(index as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Depression => "depression",
            Summit => "summit",
            Flat => "flat",
            Valley => "valley",
            Ridge => "ridge",
            Hollow => "hollow",
            Spur => "spur",
            Shoulder => "shoulder",
            Slope => "slope",
            Footslope => "footslope",
        }
    }

    /// The class of the height-negated terrain: concave forms swap with
    /// their convex counterparts; flat and slope are self-dual.
    pub fn dual(self) -> GeomorphonClass {
        match self {
            Depression => Summit,
            Summit => Depression,
            Valley => Ridge,
            Ridge => Valley,
            Hollow => Spur,
            Spur => Hollow,
            Footslope => Shoulder,
            Shoulder => Footslope,
            Flat => Flat,
            Slope => Slope,
        }
    }

    /// Display color, dark red (summit) through yellow-green to blue
    /// (depression), following the usual geomorphon legend.
    pub fn color(self) -> [u8; 3] {
        match self {
            Flat => [220, 220, 220],
            Summit => [56, 0, 0],
            Ridge => [200, 0, 0],
            Shoulder => [255, 80, 20],
            Spur => [250, 210, 60],
            Slope => [255, 255, 60],
            Hollow => [180, 230, 20],
            Footslope => [60, 250, 150],
            Valley => [0, 0, 255],
            Depression => [0, 0, 56],
        }
    }
}

// Decision table indexed by [count of -1][count of +1]. Entries with
// n- + n+ > 8 cannot arise from an 8-element pattern.
const D: GeomorphonClass = Depression;
const LOOKUP: [[GeomorphonClass; 9]; 9] = [
    [Flat, Flat, Flat, Footslope, Footslope, Valley, Valley, Valley, D],
    [Flat, Flat, Footslope, Footslope, Footslope, Valley, Valley, Valley, D],
    [Flat, Shoulder, Slope, Slope, Hollow, Hollow, Valley, D, D],
    [Shoulder, Shoulder, Slope, Slope, Slope, Hollow, D, D, D],
    [Shoulder, Shoulder, Spur, Slope, Slope, D, D, D, D],
    [Ridge, Ridge, Spur, Spur, D, D, D, D, D],
    [Ridge, Ridge, Ridge, D, D, D, D, D, D],
    [Ridge, Ridge, D, D, D, D, D, D, D],
    [Summit, D, D, D, D, D, D, D, D],
];

// The 8 compass directions as (row step, col step), with the horizontal
// distance multiplier per step (1 for cardinal, sqrt 2 for diagonal).
const DIRECTIONS: [(i64, i64); 8] = [
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
];
const SQRT_2: f64 = std::f64::consts::SQRT_2;
const STEP_LENGTH: [f64; 8] = [1.0, SQRT_2, 1.0, SQRT_2, 1.0, SQRT_2, 1.0, SQRT_2];

/// Compute the 8-direction ternary pattern of one cell.
///
/// For each direction, elevation angles to the cells along the ray are
/// reduced to their maximum b+ and minimum b-; the element is +1 when
/// b+ + b- exceeds the flatness threshold (terrain dominantly higher), -1
/// when it falls below its negation (dominantly lower), 0 otherwise.
pub fn ternary_pattern(
    field: &HeightField,
    row: usize,
    col: usize,
    params: &GeomorphonParams,
) -> Result<[i8; 8]> {
    params.validate()?;
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }
    let radius = params.search_radius_cells;
    if row < radius
        || col < radius
        || row + radius >= field.height()
        || col + radius >= field.width()
    {
        return Err(TerrainError::InsideBorderMargin {
            row,
            col,
            margin: radius,
        });
    }
    Ok(pattern_unchecked(field, row, col, params))
}

#[inline]
fn pattern_unchecked(
    field: &HeightField,
    row: usize,
    col: usize,
    params: &GeomorphonParams,
) -> [i8; 8] {
    let z0 = field.get(row, col);
    let cell = field.cell_size();
    let threshold = params.flatness_deg;
    let mut pattern = [0i8; 8];
    for (dir, &(dr, dc)) in DIRECTIONS.iter().enumerate() {
        let step = cell * STEP_LENGTH[dir];
        let mut highest = f64::NEG_INFINITY;
        let mut lowest = f64::INFINITY;
        for k in 1..=params.search_radius_cells as i64 {
            let r = (row as i64 + dr * k) as usize;
            let c = (col as i64 + dc * k) as usize;
            let angle = (field.get(r, c) - z0).atan2(step * k as f64).to_degrees();
            highest = highest.max(angle);
            lowest = lowest.min(angle);
        }
        let openness = highest + lowest;
        pattern[dir] = if openness > threshold {
            1
        } else if openness < -threshold {
            -1
        } else {
            0
        };
    }
    pattern
}

/// Map an 8-direction ternary pattern to its landform class.
pub fn classify_cell(pattern: &[i8; 8]) -> GeomorphonClass {
    let positives = pattern.iter().filter(|&&v| v == 1).count();
    let negatives = pattern.iter().filter(|&&v| v == -1).count();
    LOOKUP[negatives][positives]
}

/// Per-cell landform classes with an unclassified border margin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeomorphonMap {
    width: usize,
    height: usize,
    border_margin: usize,
    cells: Vec<Option<GeomorphonClass>>,
}

impl GeomorphonMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Width of the unclassified edge band, equal to the search radius.
    pub fn border_margin(&self) -> usize {
        self.border_margin
    }

    /// None inside the border margin.
    #[inline]
    pub fn class_at(&self, row: usize, col: usize) -> Option<GeomorphonClass> {
        self.cells[row * self.width + col]
    }

    pub fn cells(&self) -> &[Option<GeomorphonClass>] {
        &self.cells
    }

    pub fn classified_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Indexed 8-bit raster: canonical class index per cell, 255 for the
    /// unclassified margin. Pair with [`legend_json`] for interpretation.
    pub fn to_gray_raster(&self) -> GrayRaster {
        GrayRaster {
            width: self.width,
            height: self.height,
            pixels: self
                .cells
                .iter()
                .map(|c| c.map_or(UNCLASSIFIED_INDEX, |cls| cls.index() as u8))
                .collect(),
        }
    }
}

/// Legend for exported maps: raster index to class name and display color.
pub fn legend_json() -> serde_json::Value {
    let mut legend = serde_json::Map::new();
    for class in GeomorphonClass::ALL {
        legend.insert(
            class.index().to_string(),
            serde_json::json!({ "class": class.name(), "color": class.color() }),
        );
    }
    legend.insert(
        UNCLASSIFIED_INDEX.to_string(),
        serde_json::json!({ "class": "unclassified", "color": [0, 0, 0] }),
    );
    serde_json::Value::Object(legend)
}

/// Classify every interior cell of a void-free field.
///
/// Interior means at least `search_radius_cells` from every border; the
/// margin is left unclassified. Cells are independent, so the scan is
/// data-parallel and the result does not depend on the worker count.
pub fn classify_map(field: &HeightField, params: &GeomorphonParams) -> Result<GeomorphonMap> {
    params.validate()?;
    if field.has_voids() {
        return Err(TerrainError::VoidsPresent(field.void_count()));
    }
    let radius = params.search_radius_cells;
    let (w, h) = (field.width(), field.height());
    if w <= 2 * radius || h <= 2 * radius {
        return Err(TerrainError::FieldTooSmall {
            width: w,
            height: h,
            radius,
        });
    }

    let mut cells: Vec<Option<GeomorphonClass>> = vec![None; w * h];
    cells
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(row, row_cells)| {
            if row < radius || row + radius >= h {
                return;
            }
            for (col, out) in row_cells.iter_mut().enumerate().take(w - radius).skip(radius) {
                let pattern = pattern_unchecked(field, row, col, params);
                *out = Some(classify_cell(&pattern));
            }
        });

    Ok(GeomorphonMap {
        width: w,
        height: h,
        border_margin: radius,
        cells,
    })
}

/// Normalized coverage of each class over the classified cells, in
/// canonical order. Components are non-negative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomorphonHistogram {
    pub coverage: [f64; CLASS_COUNT],
}

impl GeomorphonHistogram {
    pub fn get(&self, class: GeomorphonClass) -> f64 {
        self.coverage[class.index()]
    }

    /// Euclidean distance between coverage vectors.
    pub fn distance(&self, other: &GeomorphonHistogram) -> f64 {
        self.coverage
            .iter()
            .zip(&other.coverage)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Count classified cells per class and normalize by their total.
pub fn histogram(map: &GeomorphonMap) -> Result<GeomorphonHistogram> {
    let mut counts = [0u64; CLASS_COUNT];
    let mut total = 0u64;
    for class in map.cells.iter().flatten() {
        counts[class.index()] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(TerrainError::EmptyInput(
            "geomorphon map has no classified cells".into(),
        ));
    }
    let mut coverage = [0.0; CLASS_COUNT];
    for (c, &n) in coverage.iter_mut().zip(&counts) {
        *c = n as f64 / total as f64;
    }
    Ok(GeomorphonHistogram { coverage })
}

/// Classify and reduce to the coverage histogram in one step.
pub fn histogram_of(field: &HeightField, params: &GeomorphonParams) -> Result<GeomorphonHistogram> {
    histogram(&classify_map(field, params)?)
}
