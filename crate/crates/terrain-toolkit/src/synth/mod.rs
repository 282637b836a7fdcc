//! Seeded, deterministic synthetic terrain in six categories: gradient
//! noise, ridged noise, midpoint-displacement fBm, and thermal, fluvial,
//! and coastal erosion applied to noise-based starting terrain.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TerrainError};
use crate::raster::{HeightField, DEFAULT_CELL_SIZE_M};

mod fluvial;
mod midpoint;
mod noise;
mod thermal;

pub use fluvial::{
    erode_coastal, erode_fluvial, erode_fluvial_ledger, sea_level, FluvialLedger, FluvialParams,
};
pub use thermal::{erode_thermal, max_slope_deg};

/// Version tag of the frozen per-category default parameters below.
pub const SYNTH_DEFAULTS_VERSION: &str = "synth-defaults-v1";

/// The six synthetic terrain categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthCategory {
    Noise,
    Ridged,
    Fbm,
    Thermal,
    Fluvial,
    Coastal,
}

impl SynthCategory {
    pub const ALL: [SynthCategory; 6] = [
        SynthCategory::Noise,
        SynthCategory::Ridged,
        SynthCategory::Fbm,
        SynthCategory::Thermal,
        SynthCategory::Fluvial,
        SynthCategory::Coastal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SynthCategory::Noise => "noise",
            SynthCategory::Ridged => "ridged",
            SynthCategory::Fbm => "fbm",
            SynthCategory::Thermal => "thermal",
            SynthCategory::Fluvial => "fluvial",
            SynthCategory::Coastal => "coastal",
        }
    }

    pub fn parse(name: &str) -> Option<SynthCategory> {
        SynthCategory::ALL
            .into_iter()
            .find(|c| c.name() == name.to_ascii_lowercase())
    }
}

impl std::fmt::Display for SynthCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full recipe for one synthetic terrain. Every generator is a pure
/// function of this value: equal specs give bit-identical rasters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub category: SynthCategory,
    pub seed: u64,
    /// Cells per side; fBm requires 2^k + 1.
    pub size: usize,
    pub cell_size: f64,
    /// Vertical range of the base surface in meters.
    pub relief_m: f64,
    /// Lattice units of base noise across the field.
    pub frequency: f64,
    pub octaves: u32,
    pub lacunarity: f64,
    pub gain: f64,
    /// fBm spectral exponent H in (0, 1].
    pub roughness: f64,
    pub talus_deg: f64,
    pub iterations: u32,
    /// Thermal transfer rate in (0, 1].
    pub rate: f64,
    pub rain_rate: f64,
    pub capacity_k: f64,
    pub dissolve_k: f64,
    pub deposit_k: f64,
    pub evaporation: f64,
    pub sea_level_fraction: f64,
    pub band_m: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            category: SynthCategory::Noise,
            seed: 0,
            size: 513,
            cell_size: DEFAULT_CELL_SIZE_M,
            relief_m: 900.0,
            frequency: 4.0,
            octaves: 5,
            lacunarity: 2.0,
            gain: 0.5,
            roughness: 0.85,
            talus_deg: 32.0,
            iterations: 250,
            rate: 0.5,
            rain_rate: 0.01,
            capacity_k: 150.0,
            dissolve_k: 0.35,
            deposit_k: 0.05,
            evaporation: 0.1,
            sea_level_fraction: 0.35,
            band_m: 120.0,
        }
    }
}

impl SynthSpec {
    /// Spec with the frozen per-category defaults
    /// ([`SYNTH_DEFAULTS_VERSION`]).
    pub fn new(category: SynthCategory, seed: u64, size: usize) -> SynthSpec {
        let mut spec = SynthSpec {
            category,
            seed,
            size,
            ..SynthSpec::default()
        };
        match category {
            SynthCategory::Noise => {}
            SynthCategory::Ridged => {
                spec.octaves = 6;
                spec.frequency = 5.0;
                spec.relief_m = 1100.0;
            }
            SynthCategory::Fbm => {
                spec.roughness = 0.85;
            }
            SynthCategory::Thermal => {
                // Long, low-angle weathering: relaxes noise into smooth
                // aprons whose flat/slope/footslope mix scores at the top
                // of the synthetic range, like the study's thermal set.
                spec.relief_m = 250.0;
                spec.talus_deg = 2.0;
                spec.iterations = 600;
            }
            SynthCategory::Fluvial => {
                spec.relief_m = 1000.0;
                spec.iterations = 350;
            }
            SynthCategory::Coastal => {
                spec.relief_m = 1000.0;
                spec.iterations = 250;
            }
        }
        spec
    }

    pub fn fluvial_params(&self) -> FluvialParams {
        FluvialParams {
            iterations: self.iterations,
            rain_rate: self.rain_rate,
            capacity_k: self.capacity_k,
            dissolve_k: self.dissolve_k,
            deposit_k: self.deposit_k,
            evaporation: self.evaporation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 33 {
            return Err(TerrainError::InvalidParameter(format!(
                "size must be at least 33 cells per side, got {}",
                self.size
            )));
        }
        if self.category == SynthCategory::Fbm && !(self.size - 1).is_power_of_two() {
            return Err(TerrainError::InvalidParameter(format!(
                "fbm requires size = 2^k + 1, got {}",
                self.size
            )));
        }
        if self.octaves < 1 {
            return Err(TerrainError::InvalidParameter("octaves must be at least 1".into()));
        }
        if !(self.talus_deg > 0.0 && self.talus_deg < 90.0) {
            return Err(TerrainError::InvalidParameter(format!(
                "talus angle must be in (0, 90) degrees, got {}",
                self.talus_deg
            )));
        }
        for (name, v) in [
            ("cell_size", self.cell_size),
            ("relief_m", self.relief_m),
            ("frequency", self.frequency),
            ("lacunarity", self.lacunarity),
            ("gain", self.gain),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TerrainError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.roughness > 0.0 && self.roughness <= 1.0) {
            return Err(TerrainError::InvalidParameter(format!(
                "roughness must be in (0, 1], got {}",
                self.roughness
            )));
        }
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(TerrainError::InvalidParameter(format!(
                "thermal rate must be in (0, 1], got {}",
                self.rate
            )));
        }
        if !(0.0..=1.0).contains(&self.sea_level_fraction) {
            return Err(TerrainError::InvalidParameter(format!(
                "sea level fraction must be in [0, 1], got {}",
                self.sea_level_fraction
            )));
        }
        if !(self.band_m >= 0.0 && self.band_m.is_finite()) {
            return Err(TerrainError::InvalidParameter(format!(
                "band must be non-negative, got {}",
                self.band_m
            )));
        }
        self.fluvial_params().validate()
    }

    /// Generate the terrain this spec describes.
    pub fn generate(&self) -> Result<HeightField> {
        self.validate()?;
        match self.category {
            SynthCategory::Noise => gen_noise(self),
            SynthCategory::Ridged => gen_ridged(self),
            SynthCategory::Fbm => gen_fbm(self),
            SynthCategory::Thermal => {
                let base = gen_noise(self)?;
                erode_thermal(&base, self.talus_deg, self.iterations, self.rate)
            }
            SynthCategory::Fluvial => {
                let base = gen_noise(self)?;
                erode_fluvial(&base, &self.fluvial_params())
            }
            SynthCategory::Coastal => {
                let base = gen_noise(self)?;
                erode_coastal(&base, self.sea_level_fraction, self.band_m, &self.fluvial_params())
            }
        }
    }
}

/// Multi-octave gradient noise normalized to [0, relief_m].
pub fn gen_noise(spec: &SynthSpec) -> Result<HeightField> {
    spec.validate()?;
    let mut values = noise::octave_grid(
        spec.seed,
        spec.size,
        spec.frequency,
        spec.octaves,
        spec.lacunarity,
        spec.gain,
        false,
    );
    noise::normalize_to_relief(&mut values, spec.relief_m);
    HeightField::new(
        spec.size,
        spec.size,
        spec.cell_size,
        values,
        vec![false; spec.size * spec.size],
    )
}

/// Ridged noise: each octave passes through 1 - |n| before summation,
/// creating crease lines along the zero crossings.
pub fn gen_ridged(spec: &SynthSpec) -> Result<HeightField> {
    spec.validate()?;
    let mut values = noise::octave_grid(
        spec.seed,
        spec.size,
        spec.frequency,
        spec.octaves,
        spec.lacunarity,
        spec.gain,
        true,
    );
    noise::normalize_to_relief(&mut values, spec.relief_m);
    HeightField::new(
        spec.size,
        spec.size,
        spec.cell_size,
        values,
        vec![false; spec.size * spec.size],
    )
}

/// Midpoint-displacement fBm surface; requires size = 2^k + 1.
pub fn gen_fbm(spec: &SynthSpec) -> Result<HeightField> {
    spec.validate()?;
    if !(spec.size - 1).is_power_of_two() {
        return Err(TerrainError::InvalidParameter(format!(
            "fbm requires size = 2^k + 1, got {}",
            spec.size
        )));
    }
    let values = midpoint::diamond_square(spec.seed, spec.size, spec.roughness, spec.relief_m);
    HeightField::new(
        spec.size,
        spec.size,
        spec.cell_size,
        values,
        vec![false; spec.size * spec.size],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomorphon::{histogram_of, GeomorphonClass, GeomorphonParams};

    #[test]
    fn spec_json_round_trips() {
        let spec = SynthSpec::new(SynthCategory::Coastal, 42, 129);
        let json = serde_json::to_string(&spec).unwrap();
        let back: SynthSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        // Partial JSON picks up defaults.
        let partial: SynthSpec =
            serde_json::from_str("{\"category\":\"ridged\",\"seed\":7,\"size\":65}").unwrap();
        assert_eq!(partial.category, SynthCategory::Ridged);
        assert_eq!(partial.octaves, SynthSpec::default().octaves);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut spec = SynthSpec::new(SynthCategory::Noise, 0, 32);
        assert!(spec.validate().is_err()); // too small
        spec.size = 64;
        spec.octaves = 0;
        assert!(spec.validate().is_err());
        spec.octaves = 4;
        assert!(spec.validate().is_ok());
        spec.category = SynthCategory::Fbm;
        assert!(spec.validate().is_err()); // 64 is not 2^k + 1
        spec.size = 65;
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn every_category_is_deterministic_per_seed() {
        for category in SynthCategory::ALL {
            let size = 65;
            let a = SynthSpec::new(category, 9, size).generate().unwrap();
            let b = SynthSpec::new(category, 9, size).generate().unwrap();
            assert_eq!(a, b, "category {category} not deterministic");
            let c = SynthSpec::new(category, 10, size).generate().unwrap();
            let differing = a
                .elevations()
                .iter()
                .zip(c.elevations())
                .filter(|(x, y)| x != y)
                .count();
            assert!(
                differing >= a.len() / 100,
                "category {category}: different seeds differ in only {differing} cells"
            );
        }
    }

    #[test]
    fn different_seed_pairs_differ_in_at_least_one_percent_of_cells() {
        for pair in 0..20u64 {
            let a = SynthSpec::new(SynthCategory::Noise, pair * 2, 65)
                .generate()
                .unwrap();
            let b = SynthSpec::new(SynthCategory::Noise, pair * 2 + 1, 65)
                .generate()
                .unwrap();
            let differing = a
                .elevations()
                .iter()
                .zip(b.elevations())
                .filter(|(x, y)| x != y)
                .count();
            assert!(differing >= a.len() / 100);
        }
    }

    #[test]
    fn noise_output_spans_zero_to_relief() {
        let spec = SynthSpec::new(SynthCategory::Noise, 3, 65);
        let field = gen_noise(&spec).unwrap();
        let (lo, hi) = field.min_max().unwrap();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, spec.relief_m);
        let ridged = gen_ridged(&spec).unwrap();
        let (lo, hi) = ridged.min_max().unwrap();
        assert_eq!(lo, 0.0);
        assert_eq!(hi, spec.relief_m);
    }

    #[test]
    fn ridged_noise_has_more_ridge_coverage_than_plain_noise() {
        let params = GeomorphonParams::default();
        let mut ridge_ridged = 0.0;
        let mut ridge_plain = 0.0;
        for seed in 0..10 {
            let mut spec = SynthSpec::new(SynthCategory::Noise, seed, 129);
            let plain = gen_noise(&spec).unwrap();
            spec.category = SynthCategory::Ridged;
            let ridged = gen_ridged(&spec).unwrap();
            ridge_plain += histogram_of(&plain, &params).unwrap().get(GeomorphonClass::Ridge);
            ridge_ridged += histogram_of(&ridged, &params)
                .unwrap()
                .get(GeomorphonClass::Ridge);
        }
        assert!(
            ridge_ridged > ridge_plain,
            "ridged {ridge_ridged} vs plain {ridge_plain}"
        );
    }

    #[test]
    fn fbm_increment_variance_follows_the_2h_scaling() {
        // For a self-affine surface, Var[z(p + lag) - z(p)] grows like
        // lag^(2H); the ratio between doubled lags should sit near 2^(2H).
        // Midpoint displacement is only approximately fBm, hence the wide
        // tolerance.
        let roughness = 0.85;
        let expected = 2.0f64.powf(2.0 * roughness);
        let mut ratios = Vec::new();
        for seed in 0..20u64 {
            let mut spec = SynthSpec::new(SynthCategory::Fbm, seed, 129);
            spec.roughness = roughness;
            let field = gen_fbm(&spec).unwrap();
            let var_of_lag = |lag: usize| -> f64 {
                let mut diffs = Vec::new();
                for row in 0..field.height() {
                    for col in 0..field.width() - lag {
                        diffs.push(field.get(row, col + lag) - field.get(row, col));
                    }
                }
                let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
                diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / diffs.len() as f64
            };
            ratios.push(var_of_lag(2) / var_of_lag(1));
            ratios.push(var_of_lag(4) / var_of_lag(2));
        }
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(
            (mean_ratio / expected - 1.0).abs() < 0.30,
            "mean lag-doubling ratio {mean_ratio} vs expected {expected}"
        );
    }

    #[test]
    fn fluvial_cone_gains_valley_coverage() {
        // A lightly roughened cone develops radial drainage under fluvial
        // erosion, which reads as extra valley coverage.
        let params = GeomorphonParams::default();
        let spec = SynthSpec::new(SynthCategory::Fluvial, 77, 65);
        let roughness = super::noise::octave_grid(7, 65, 6.0, 4, 2.0, 0.5, false);
        let mid = 32.0;
        let base = HeightField::from_fn(65, 65, 200.0, |row, col| {
            let dr = row as f64 - mid;
            let dc = col as f64 - mid;
            (1400.0 - (dr * dr + dc * dc).sqrt() * 40.0).max(0.0)
                + roughness[row * 65 + col] * 40.0
        })
        .unwrap();
        let eroded = erode_fluvial(&base, &spec.fluvial_params()).unwrap();
        let before = histogram_of(&base, &params).unwrap().get(GeomorphonClass::Valley);
        let after = histogram_of(&eroded, &params)
            .unwrap()
            .get(GeomorphonClass::Valley);
        assert!(after > before, "valley coverage {before} -> {after}");
    }
}
