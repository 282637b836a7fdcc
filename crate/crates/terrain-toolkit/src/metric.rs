//! Perceived terrain realism scoring (PTRM).
//!
//! A score in [0, 1] (0 = poor, 1 = realistic) is an affine function of the
//! min-max normalized geomorphon coverages, divided by a fixed scale and
//! optionally clamped. The affine coefficients, the divisor, and the
//! normalization bounds travel together as a [`Calibration`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};
use crate::geomorphon::{GeomorphonHistogram, GeomorphonParams, CLASS_COUNT};

/// Name of the primary shipped calibration.
pub const MAIN_CALIBRATION: &str = "ptrm-main";
/// Name of the holdout-averaged shipped calibration.
pub const VALIDATION_CALIBRATION: &str = "ptrm-validation";

/// Version tag of the bundled reference corpus the shipped normalization
/// bounds were computed from.
pub const BUNDLED_BOUNDS_VERSION: &str = "bundled-corpus-v1";

// Per-feature normalization bounds in canonical class order: min/max
// coverage over the 150 bundled synthetic terrains (six categories, 25
// seeds each; see corpus::bundled) at L = 2, t = 1.0. Regenerate with the
// maintenance test print_bundled_bounds after changing any generator.
const BUNDLED_FEATURE_MIN: [f64; CLASS_COUNT] = [
    1.5622803043322032e-05,
    1.5622803043322032e-05,
    0.0,
    0.013779312284210032,
    0.014232373572466372,
    0.056445187395522504,
    0.05692949428986549,
    0.000937368182599322,
    0.30173881797872176,
    0.000968613788685966,
];
const BUNDLED_FEATURE_MAX: [f64; CLASS_COUNT] = [
    0.022028152291084065,
    0.020247152744145354,
    0.1661485103657298,
    0.14766673436547986,
    0.14985392679154494,
    0.20531487759533815,
    0.16674217688137605,
    0.12120170601009234,
    0.5619053570591636,
    0.12396694214876033,
];

/// Everything needed to turn a geomorphon histogram into a realism score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub name: String,
    pub intercept: f64,
    /// Affine weights in canonical class order (depression .. footslope).
    pub weights: [f64; CLASS_COUNT],
    /// Positive scale dividing the affine combination.
    pub divisor: f64,
    /// Per-feature lower normalization bounds over the reference corpus.
    pub feature_min: [f64; CLASS_COUNT],
    /// Per-feature upper normalization bounds over the reference corpus.
    pub feature_max: [f64; CLASS_COUNT],
    /// Clamp the final score into [0, 1].
    pub clamp: bool,
    /// Geomorphon parameters the calibration was computed with.
    pub geomorphon: GeomorphonParams,
    pub provenance: String,
}

impl Calibration {
    pub fn validate(&self) -> Result<()> {
        let divisor_ok = self.divisor > 0.0 && self.divisor.is_finite();
        if !divisor_ok {
            return Err(TerrainError::CalibrationSchema(format!(
                "divisor must be a positive real, got {}",
                self.divisor
            )));
        }
        if !self.intercept.is_finite() {
            return Err(TerrainError::CalibrationSchema("non-finite intercept".into()));
        }
        for i in 0..CLASS_COUNT {
            if !self.weights[i].is_finite()
                || !self.feature_min[i].is_finite()
                || !self.feature_max[i].is_finite()
            {
                return Err(TerrainError::CalibrationSchema(format!(
                    "non-finite entry in component {i}"
                )));
            }
            if self.feature_max[i] < self.feature_min[i] {
                return Err(TerrainError::CalibrationSchema(format!(
                    "feature_max[{i}] = {} below feature_min[{i}] = {}",
                    self.feature_max[i], self.feature_min[i]
                )));
            }
        }
        self.geomorphon.validate()?;
        Ok(())
    }

    /// The divisor that maps the all-ones feature vector to a raw score of
    /// exactly 1.0: intercept plus the sum of the weights.
    pub fn self_consistent_divisor(&self) -> f64 {
        self.intercept + self.weights.iter().sum::<f64>()
    }

    /// Copy of this calibration with the self-consistent divisor.
    pub fn with_self_consistent_divisor(&self) -> Result<Calibration> {
        let divisor = self.self_consistent_divisor();
        if divisor <= 0.0 || divisor.is_nan() {
            return Err(TerrainError::CalibrationSchema(format!(
                "self-consistent divisor {divisor} is not positive"
            )));
        }
        let mut cal = self.clone();
        cal.divisor = divisor;
        Ok(cal)
    }
}

/// Geomorphon coverages rescaled against the calibration bounds, each
/// component clamped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedFeatures {
    pub values: [f64; CLASS_COUNT],
}

/// Min-max normalize a histogram against the calibration's reference
/// bounds. Components with a degenerate bound (max == min) map to 0.
pub fn normalize_features(hist: &GeomorphonHistogram, cal: &Calibration) -> NormalizedFeatures {
    let mut values = [0.0; CLASS_COUNT];
    for (i, value) in values.iter_mut().enumerate() {
        let span = cal.feature_max[i] - cal.feature_min[i];
        *value = if span > 0.0 {
            ((hist.coverage[i] - cal.feature_min[i]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
    }
    NormalizedFeatures { values }
}

/// The affine combination divided by the calibration scale, without
/// clamping.
pub fn ptrm_raw(features: &NormalizedFeatures, cal: &Calibration) -> f64 {
    let mut acc = cal.intercept;
    for i in 0..CLASS_COUNT {
        acc += cal.weights[i] * features.values[i];
    }
    acc / cal.divisor
}

/// The realism score: the raw value, clamped into [0, 1] when the
/// calibration says so.
pub fn ptrm_score(features: &NormalizedFeatures, cal: &Calibration) -> f64 {
    let raw = ptrm_raw(features, cal);
    if cal.clamp {
        raw.clamp(0.0, 1.0)
    } else {
        raw
    }
}

/// Normalize and score a histogram in one step.
pub fn score_histogram(hist: &GeomorphonHistogram, cal: &Calibration) -> f64 {
    ptrm_score(&normalize_features(hist, cal), cal)
}

/// The two shipped calibrations by name, or None for unknown names.
pub fn builtin(name: &str) -> Option<Calibration> {
    let (intercept, weights, divisor) = match name {
        MAIN_CALIBRATION => (
            -38.02,
            [3.55, 1.75, 25.12, 9.61, 7.59, 6.71, 9.02, 7.31, 28.95, 7.63],
            69.96,
        ),
        VALIDATION_CALIBRATION => (
            -38.44,
            [3.61, 1.77, 25.40, 9.71, 7.65, 6.77, 9.14, 7.40, 29.26, 7.69],
            69.22,
        ),
        _ => return None,
    };
    Some(Calibration {
        name: name.to_string(),
        intercept,
        weights,
        divisor,
        feature_min: BUNDLED_FEATURE_MIN,
        feature_max: BUNDLED_FEATURE_MAX,
        clamp: true,
        geomorphon: GeomorphonParams::default(),
        provenance: format!("shipped coefficients; normalization bounds {BUNDLED_BOUNDS_VERSION}"),
    })
}

/// Load a calibration from JSON on disk.
pub fn load_calibration(path: &Path) -> Result<Calibration> {
    let text = std::fs::read_to_string(path).map_err(|e| TerrainError::io(path, e))?;
    let cal: Calibration = serde_json::from_str(&text)
        .map_err(|e| TerrainError::CalibrationSchema(format!("{}: {e}", path.display())))?;
    cal.validate()?;
    Ok(cal)
}

pub fn save_calibration(cal: &Calibration, path: &Path) -> Result<()> {
    cal.validate()?;
    let json = serde_json::to_string_pretty(cal).expect("calibration serializes");
    std::fs::write(path, json).map_err(|e| TerrainError::io(path, e))
}

/// Resolve a name-or-path argument: shipped names first, then the
/// filesystem.
pub fn resolve_calibration(name_or_path: &str) -> Result<Calibration> {
    if let Some(cal) = builtin(name_or_path) {
        return Ok(cal);
    }
    load_calibration(Path::new(name_or_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(coverage: [f64; CLASS_COUNT]) -> GeomorphonHistogram {
        GeomorphonHistogram { coverage }
    }

    fn unit_bounds(mut cal: Calibration) -> Calibration {
        cal.feature_min = [0.0; CLASS_COUNT];
        cal.feature_max = [1.0; CLASS_COUNT];
        cal
    }

    #[test]
    fn builtin_main_carries_printed_constants() {
        let cal = builtin(MAIN_CALIBRATION).unwrap();
        assert_eq!(cal.intercept, -38.02);
        assert_eq!(cal.divisor, 69.96);
        assert_eq!(cal.weights[0], 3.55); // depression
        assert_eq!(cal.weights[2], 25.12); // flat
        assert_eq!(cal.weights[8], 28.95); // slope
        assert!(cal.clamp);
        cal.validate().unwrap();
    }

    #[test]
    fn builtin_validation_carries_printed_constants() {
        let cal = builtin(VALIDATION_CALIBRATION).unwrap();
        assert_eq!(cal.intercept, -38.44);
        assert_eq!(cal.divisor, 69.22);
        assert_eq!(cal.weights[0], 3.61);
        assert_eq!(cal.weights[9], 7.69); // footslope
        cal.validate().unwrap();
    }

    #[test]
    fn unknown_builtin_is_none() {
        assert!(builtin("ptrm-imaginary").is_none());
    }

    #[test]
    fn normalization_maps_bounds_to_unit_interval() {
        let mut cal = builtin(MAIN_CALIBRATION).unwrap();
        cal.feature_min = [0.1; CLASS_COUNT];
        cal.feature_max = [0.3; CLASS_COUNT];
        let lo = normalize_features(&hist([0.1; CLASS_COUNT]), &cal);
        assert_eq!(lo.values, [0.0; CLASS_COUNT]);
        let hi = normalize_features(&hist([0.3; CLASS_COUNT]), &cal);
        assert_eq!(hi.values, [1.0; CLASS_COUNT]);
        let mid = normalize_features(&hist([0.2; CLASS_COUNT]), &cal);
        for v in mid.values {
            assert!((v - 0.5).abs() < 1e-12);
        }
        // Out-of-bounds coverages clamp per component.
        let over = normalize_features(&hist([0.9; CLASS_COUNT]), &cal);
        assert_eq!(over.values, [1.0; CLASS_COUNT]);
    }

    #[test]
    fn degenerate_bounds_map_to_zero() {
        let mut cal = builtin(MAIN_CALIBRATION).unwrap();
        cal.feature_min[3] = 0.25;
        cal.feature_max[3] = 0.25;
        let f = normalize_features(&hist([0.25; CLASS_COUNT]), &cal);
        assert_eq!(f.values[3], 0.0);
    }

    #[test]
    fn score_arithmetic_matches_hand_computation() {
        let main = unit_bounds(builtin(MAIN_CALIBRATION).unwrap());
        let validation = unit_bounds(builtin(VALIDATION_CALIBRATION).unwrap());
        let zeros = NormalizedFeatures {
            values: [0.0; CLASS_COUNT],
        };
        let ones = NormalizedFeatures {
            values: [1.0; CLASS_COUNT],
        };

        // All-zero features: -38.02 / 69.96 raw, clamped to 0.
        assert!((ptrm_raw(&zeros, &main) - (-38.02 / 69.96)).abs() < 1e-12);
        assert_eq!(ptrm_score(&zeros, &main), 0.0);

        // All-one features, main model: (107.24 - 38.02) / 69.96.
        assert!((ptrm_raw(&ones, &main) - 69.22 / 69.96).abs() < 1e-9);
        assert!((ptrm_score(&ones, &main) - 0.98942).abs() < 1e-5);

        // All-one features, validation model: 69.96 / 69.22, clamped to 1.
        assert!((ptrm_raw(&ones, &validation) - 69.96 / 69.22).abs() < 1e-9);
        assert_eq!(ptrm_score(&ones, &validation), 1.0);
    }

    #[test]
    fn self_consistent_divisor_sends_all_ones_to_one() {
        for name in [MAIN_CALIBRATION, VALIDATION_CALIBRATION] {
            let cal = unit_bounds(builtin(name).unwrap())
                .with_self_consistent_divisor()
                .unwrap();
            let ones = NormalizedFeatures {
                values: [1.0; CLASS_COUNT],
            };
            assert!((ptrm_raw(&ones, &cal) - 1.0).abs() < 1e-12);
        }
        // The two shipped models' self-consistent divisors mirror each
        // other's printed divisors.
        let main = builtin(MAIN_CALIBRATION).unwrap();
        let validation = builtin(VALIDATION_CALIBRATION).unwrap();
        assert!((main.self_consistent_divisor() - 69.22).abs() < 1e-9);
        assert!((validation.self_consistent_divisor() - 69.96).abs() < 1e-9);
    }

    #[test]
    fn raw_score_is_affine_in_features() {
        let cal = unit_bounds(builtin(MAIN_CALIBRATION).unwrap());
        let a = NormalizedFeatures {
            values: [0.3, 0.1, 0.9, 0.2, 0.4, 0.6, 0.05, 0.7, 0.35, 0.8],
        };
        let b = NormalizedFeatures {
            values: [0.6, 0.9, 0.1, 0.85, 0.25, 0.3, 0.45, 0.15, 0.95, 0.05],
        };
        for alpha in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let mut mixed = [0.0; CLASS_COUNT];
            for (i, m) in mixed.iter_mut().enumerate() {
                *m = alpha * a.values[i] + (1.0 - alpha) * b.values[i];
            }
            let lhs = ptrm_raw(&NormalizedFeatures { values: mixed }, &cal);
            let rhs = alpha * ptrm_raw(&a, &cal) + (1.0 - alpha) * ptrm_raw(&b, &cal);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn clamped_score_stays_in_unit_interval_and_is_monotone() {
        let cal = unit_bounds(builtin(MAIN_CALIBRATION).unwrap());
        let mut values = [0.5; CLASS_COUNT];
        let base = ptrm_score(&NormalizedFeatures { values }, &cal);
        assert!((0.0..=1.0).contains(&base));
        // Every weight of the shipped model is positive, so raising any
        // feature may not lower the clamped score.
        for i in 0..CLASS_COUNT {
            assert!(cal.weights[i] > 0.0);
            values[i] = 0.9;
            let bumped = ptrm_score(&NormalizedFeatures { values }, &cal);
            assert!(bumped >= base);
            values[i] = 0.5;
        }
    }

    #[test]
    fn calibration_json_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cal.json");
        let cal = builtin(VALIDATION_CALIBRATION).unwrap();
        save_calibration(&cal, &path).unwrap();
        let back = load_calibration(&path).unwrap();
        assert_eq!(back, cal);
    }

    #[test]
    fn schema_violations_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\"name\": \"x\"}").unwrap();
        assert!(matches!(
            load_calibration(&path),
            Err(TerrainError::CalibrationSchema(_))
        ));

        let mut cal = builtin(MAIN_CALIBRATION).unwrap();
        cal.divisor = 0.0;
        assert!(cal.validate().is_err());
        cal.divisor = 69.96;
        cal.feature_max[0] = -1.0;
        assert!(cal.validate().is_err());
    }

    #[test]
    fn resolve_prefers_builtins_then_paths() {
        assert_eq!(
            resolve_calibration(MAIN_CALIBRATION).unwrap().intercept,
            -38.02
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("custom.json");
        let mut cal = builtin(MAIN_CALIBRATION).unwrap();
        cal.name = "custom".into();
        save_calibration(&cal, &path).unwrap();
        let resolved = resolve_calibration(path.to_str().unwrap()).unwrap();
        assert_eq!(resolved.name, "custom");
        assert!(resolve_calibration("no-such-file.json").is_err());
    }
}
