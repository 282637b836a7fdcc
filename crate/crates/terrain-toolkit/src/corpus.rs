//! Batch pipeline over a manifest of DEMs: classify, score, aggregate per
//! category, emit reports, and refit calibrations from measured scores.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};
use crate::geomorphon::{histogram_of, GeomorphonClass, GeomorphonParams, CLASS_COUNT};
use crate::metric::{score_histogram, Calibration};
use crate::raster::{fill_voids, load_dem, DemFormat};
use crate::synth::{SynthCategory, SynthSpec};

pub mod bundled;

/// One DEM in a corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: PathBuf,
    /// Category tag (RA/RC/RF/RG/RS, SP/SR/SM/ST/SF/SC, R2S/S2R, or custom).
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_score: Option<f64>,
}

/// A list of DEMs to score together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

fn valid_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl CorpusManifest {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for entry in &self.entries {
            if !valid_token(&entry.id) || !valid_token(&entry.category) {
                return Err(TerrainError::InvalidParameter(format!(
                    "ids and categories must be non-empty [A-Za-z0-9_.-] tokens: {:?}/{:?}",
                    entry.id, entry.category
                )));
            }
            if !seen.insert(&entry.id) {
                return Err(TerrainError::InvalidParameter(format!(
                    "duplicate manifest id {}",
                    entry.id
                )));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CorpusManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| TerrainError::io(path, e))?;
        let manifest: CorpusManifest = serde_json::from_str(&text)
            .map_err(|e| TerrainError::format("manifest", path, e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json).map_err(|e| TerrainError::io(path, e))
    }
}

/// One scored corpus entry. Failed entries keep their id and category and
/// carry the error text instead of numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    pub category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<[f64; CLASS_COUNT]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ptrm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Scored corpus, ordered by entry id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
}

/// Spread statistics of scores within one category.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStats {
    pub category: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
}

/// Classify and score every manifest entry.
///
/// Entries are processed in parallel and reassembled in id order, so the
/// report is a pure function of (manifest contents, params, calibration).
/// Entries with voids are filled from nearest non-void neighbors before
/// classification. Per-entry failures are recorded in their row; the
/// batch continues.
pub fn batch_score(
    manifest: &CorpusManifest,
    params: &GeomorphonParams,
    calibration: &Calibration,
) -> Result<ReportTable> {
    manifest.validate()?;
    params.validate()?;
    calibration.validate()?;

    let mut rows: Vec<ReportRow> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let scored = score_entry(entry, params, calibration);
            match scored {
                Ok((coverage, ptrm)) => ReportRow {
                    id: entry.id.clone(),
                    category: entry.category.clone(),
                    coverage: Some(coverage),
                    ptrm: Some(ptrm),
                    measured_score: entry.measured_score,
                    error: None,
                },
                Err(e) => ReportRow {
                    id: entry.id.clone(),
                    category: entry.category.clone(),
                    coverage: None,
                    ptrm: None,
                    measured_score: entry.measured_score,
                    error: Some(sanitize_error(&e.to_string())),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(ReportTable { rows })
}

fn score_entry(
    entry: &ManifestEntry,
    params: &GeomorphonParams,
    calibration: &Calibration,
) -> Result<([f64; CLASS_COUNT], f64)> {
    let format = DemFormat::from_extension(&entry.path).ok_or_else(|| {
        TerrainError::InvalidParameter(format!(
            "cannot infer DEM format of {}",
            entry.path.display()
        ))
    })?;
    let mut field = load_dem(&entry.path, format)?;
    if field.has_voids() {
        field = fill_voids(&field)?;
    }
    let hist = histogram_of(&field, params)?;
    Ok((hist.coverage, score_histogram(&hist, calibration)))
}

// Error text lands in a CSV field; keep it single-line and comma-free.
fn sanitize_error(message: &str) -> String {
    message
        .chars()
        .map(|c| match c {
            ',' => ';',
            '"' => '\'',
            '\n' | '\r' => ' ',
            c => c,
        })
        .collect()
}

impl ReportTable {
    pub fn failed_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn has_measured_scores(&self) -> bool {
        self.rows.iter().any(|r| r.measured_score.is_some())
    }

    /// Mean/median/stdev/min/max of the PTRM score per category, ordered
    /// by category name. Failed rows are excluded.
    pub fn category_stats(&self) -> Vec<CategoryStats> {
        let mut by_category: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            if let Some(score) = row.ptrm {
                by_category.entry(&row.category).or_default().push(score);
            }
        }
        by_category
            .into_iter()
            .map(|(category, mut scores)| {
                scores.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
                let count = scores.len();
                let mean = scores.iter().sum::<f64>() / count as f64;
                let median = if count % 2 == 1 {
                    scores[count / 2]
                } else {
                    (scores[count / 2 - 1] + scores[count / 2]) / 2.0
                };
                let stdev = if count > 1 {
                    (scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                        / (count - 1) as f64)
                        .sqrt()
                } else {
                    0.0
                };
                CategoryStats {
                    category: category.to_string(),
                    count,
                    mean,
                    median,
                    stdev,
                    min: scores[0],
                    max: scores[count - 1],
                }
            })
            .collect()
    }

    /// CSV with the stable column order: id, category, the ten coverages,
    /// ptrm, measured_score (only when any row has one), error.
    pub fn to_csv(&self) -> String {
        let with_measured = self.has_measured_scores();
        let mut out = String::from("id,category");
        for class in GeomorphonClass::ALL {
            out.push_str(",g_");
            out.push_str(class.name());
        }
        out.push_str(",ptrm");
        if with_measured {
            out.push_str(",measured_score");
        }
        out.push_str(",error\n");

        for row in &self.rows {
            out.push_str(&row.id);
            out.push(',');
            out.push_str(&row.category);
            match &row.coverage {
                Some(cov) => {
                    for v in cov {
                        out.push_str(&format!(",{v}"));
                    }
                }
                None => out.push_str(&",".repeat(CLASS_COUNT)),
            }
            match row.ptrm {
                Some(p) => out.push_str(&format!(",{p}")),
                None => out.push(','),
            }
            if with_measured {
                match row.measured_score {
                    Some(m) => out.push_str(&format!(",{m}")),
                    None => out.push(','),
                }
            }
            match &row.error {
                Some(e) => out.push_str(&format!(",{e}")),
                None => out.push(','),
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<ReportTable> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| TerrainError::EmptyInput("empty report".into()))?;
        let columns: Vec<&str> = header.split(',').collect();
        let with_measured = columns.contains(&"measured_score");
        let expected_markdown = if with_measured { CLASS_COUNT + 5 } else { CLASS_COUNT + 4 };
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != expected_markdown {
                return Err(TerrainError::InvalidParameter(format!(
                    "report line {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    expected_markdown
                )));
            }
            let parse_opt = |s: &str, what: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>().map(Some).map_err(|_| {
                        TerrainError::InvalidParameter(format!(
                            "bad {what} on report line {}: {s}",
                            lineno + 2
                        ))
                    })
                }
            };
            let coverage = if fields[2].is_empty() {
                None
            } else {
                let mut cov = [0.0; CLASS_COUNT];
                for (i, c) in cov.iter_mut().enumerate() {
                    *c = parse_opt(fields[2 + i], "coverage")?.ok_or_else(|| {
                        TerrainError::InvalidParameter(format!(
                            "missing coverage column on line {}",
                            lineno + 2
                        ))
                    })?;
                }
                Some(cov)
            };
            let ptrm_idx = 2 + CLASS_COUNT;
            let measured = if with_measured {
                parse_opt(fields[ptrm_idx + 1], "measured_score")?
            } else {
                None
            };
            let error_idx = if with_measured { ptrm_idx + 2 } else { ptrm_idx + 1 };
            rows.push(ReportRow {
                id: fields[0].to_string(),
                category: fields[1].to_string(),
                coverage,
                ptrm: parse_opt(fields[ptrm_idx], "ptrm")?,
                measured_score: measured,
                error: (!fields[error_idx].is_empty()).then(|| fields[error_idx].to_string()),
            });
        }
        Ok(ReportTable { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<ReportTable> {
        serde_json::from_str(text)
            .map_err(|e| TerrainError::InvalidParameter(format!("bad report JSON: {e}")))
    }
}

/// Report file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn from_extension(path: &Path) -> Option<ReportFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            _ => None,
        }
    }
}

/// Write the report to disk as CSV or JSON (same rows either way).
pub fn emit_report(table: &ReportTable, path: &Path, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Json => table.to_json(),
    };
    std::fs::write(path, text).map_err(|e| TerrainError::io(path, e))
}

/// How a refit chooses the calibration divisor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivisorPolicy {
    /// intercept + sum(weights): the all-ones feature vector maps to 1.0.
    SelfConsistent,
    /// A caller-supplied constant.
    Fixed(f64),
}

/// Per-feature min and max over a set of coverage vectors.
pub fn feature_bounds(
    coverages: &[[f64; CLASS_COUNT]],
) -> ([f64; CLASS_COUNT], [f64; CLASS_COUNT]) {
    let mut lo = [f64::INFINITY; CLASS_COUNT];
    let mut hi = [f64::NEG_INFINITY; CLASS_COUNT];
    for row in coverages {
        for i in 0..CLASS_COUNT {
            lo[i] = lo[i].min(row[i]);
            hi[i] = hi[i].max(row[i]);
        }
    }
    (lo, hi)
}

/// Refit a calibration from a report with measured scores.
///
/// Normalization bounds are the per-feature min/max over the report's
/// successful rows; the regression runs on those normalized features, and
/// the divisor follows the policy. Features with no variation in the
/// corpus are left out of the fit and get weight 0. Needs at least 12
/// rows that carry both a coverage vector and a measured score.
pub fn refit_calibration(
    report: &ReportTable,
    policy: DivisorPolicy,
    geomorphon: GeomorphonParams,
    name: &str,
    provenance: &str,
) -> Result<Calibration> {
    Ok(refit_calibration_with_fit(report, policy, geomorphon, name, provenance)?.0)
}

/// The refit together with its regression diagnostics.
pub fn refit_calibration_with_fit(
    report: &ReportTable,
    policy: DivisorPolicy,
    geomorphon: GeomorphonParams,
    name: &str,
    provenance: &str,
) -> Result<(Calibration, crate::stats::RegressionFit)> {
    let usable: Vec<(&[f64; CLASS_COUNT], f64)> = report
        .rows
        .iter()
        .filter_map(|row| match (&row.coverage, row.measured_score) {
            (Some(cov), Some(score)) => Some((cov, score)),
            _ => None,
        })
        .collect();
    if usable.len() < 12 {
        return Err(TerrainError::EmptyInput(format!(
            "refit needs at least 12 rows with coverage and measured scores, got {}",
            usable.len()
        )));
    }

    let coverages: Vec<[f64; CLASS_COUNT]> = usable.iter().map(|(c, _)| **c).collect();
    let (feature_min, feature_max) = feature_bounds(&coverages);
    let active: Vec<usize> = (0..CLASS_COUNT)
        .filter(|&i| feature_max[i] > feature_min[i])
        .collect();
    if active.is_empty() {
        return Err(TerrainError::DegenerateVariance(
            "every feature is constant over the corpus".into(),
        ));
    }

    let normalized: Vec<Vec<f64>> = coverages
        .iter()
        .map(|cov| {
            active
                .iter()
                .map(|&i| (cov[i] - feature_min[i]) / (feature_max[i] - feature_min[i]))
                .collect()
        })
        .collect();
    let scores: Vec<f64> = usable.iter().map(|(_, s)| *s).collect();
    // Coverages sum to 1, so on an unclamped corpus the normalized
    // features plus the intercept are exactly collinear; aliased columns
    // are dropped to weight 0 the way stats packages resolve them.
    let active_for_labels = active.clone();
    let (general, dropped_slots) =
        crate::stats::fit_dropping_collinear(&normalized, &scores, &move |index| {
            if index == 0 {
                "intercept".to_string()
            } else {
                GeomorphonClass::ALL[active_for_labels[index - 1]].name().to_string()
            }
        })?;

    let mut weights = [0.0; CLASS_COUNT];
    for (slot, &feature) in active.iter().enumerate() {
        weights[feature] = general.coefficients[slot];
    }
    let dropped_note = if dropped_slots.is_empty() && active.len() == CLASS_COUNT {
        String::new()
    } else {
        let mut zeroed: Vec<&str> = (0..CLASS_COUNT)
            .filter(|i| !active.contains(i))
            .map(|i| GeomorphonClass::ALL[i].name())
            .collect();
        zeroed.extend(
            dropped_slots
                .iter()
                .map(|&slot| GeomorphonClass::ALL[active[slot]].name()),
        );
        format!("; zero-weighted features: {}", zeroed.join(", "))
    };
    let fit = crate::stats::RegressionFit {
        intercept: general.intercept,
        coefficients: weights,
        r_squared: general.r_squared,
        std_error: general.std_error,
        residuals: general.residuals,
        f_statistic: general.f_statistic,
        df_num: general.df_num,
        df_den: general.df_den,
        p_value: general.p_value,
    };

    let divisor = match policy {
        DivisorPolicy::SelfConsistent => fit.intercept + fit.coefficients.iter().sum::<f64>(),
        DivisorPolicy::Fixed(value) => value,
    };
    if !(divisor > 0.0 && divisor.is_finite()) {
        return Err(TerrainError::CalibrationSchema(format!(
            "refit produced a non-positive divisor {divisor}; supply a fixed one"
        )));
    }

    let cal = Calibration {
        name: name.to_string(),
        intercept: fit.intercept,
        weights: fit.coefficients,
        divisor,
        feature_min,
        feature_max,
        clamp: true,
        geomorphon,
        provenance: format!(
            "{provenance}; refit on {} entries, r_squared {:.4}, std_error {:.4}{dropped_note}",
            usable.len(),
            fit.r_squared,
            fit.std_error
        ),
    };
    cal.validate()?;
    Ok((cal, fit))
}

/// Write every entry of a generated corpus to `dir` as ESRI ASCII files
/// and return the matching manifest. Used by examples and the acceptance
/// pipeline to build scoreable corpora from synth specs.
pub fn materialize_corpus(
    specs: &[(String, SynthSpec)],
    dir: &Path,
) -> Result<CorpusManifest> {
    std::fs::create_dir_all(dir).map_err(|e| TerrainError::io(dir, e))?;
    let entries: Vec<ManifestEntry> = specs
        .par_iter()
        .map(|(category, spec)| -> Result<ManifestEntry> {
            let field = spec.generate()?;
            let id = format!("{}-{:04}", spec.category.name(), spec.seed);
            let path = dir.join(format!("{id}.asc"));
            crate::raster::save_dem(&field, &path, DemFormat::EsriAscii)?;
            Ok(ManifestEntry {
                id,
                path,
                category: category.clone(),
                measured_score: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut entries = entries;
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    let manifest = CorpusManifest { entries };
    manifest.validate()?;
    Ok(manifest)
}

/// Category tag used in manifests for a synthetic category (SP, SR, SM,
/// ST, SF, SC).
pub fn category_tag(category: SynthCategory) -> &'static str {
    match category {
        SynthCategory::Noise => "SP",
        SynthCategory::Ridged => "SR",
        SynthCategory::Fbm => "SM",
        SynthCategory::Thermal => "ST",
        SynthCategory::Fluvial => "SF",
        SynthCategory::Coastal => "SC",
    }
}
