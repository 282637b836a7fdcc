//! The bundled reference corpus: frozen synth specs that define the
//! normalization bounds shipped with the built-in calibrations, plus a
//! parameter-diverse sample set standing in for the spread of real
//! terrain. Everything here is derived from seeds, so the corpus is
//! reproducible without shipping rasters.

use crate::synth::{SynthCategory, SynthSpec};

/// Version tag; bump when any spec below changes.
pub const BUNDLED_CORPUS_VERSION: &str = "bundled-corpus-v1";

/// Cells per side of every bundled terrain (2^8 + 1 so fBm is valid).
pub const BUNDLED_SIZE: usize = 257;

/// Seeds per synthetic category.
pub const BUNDLED_SEEDS_PER_CATEGORY: u64 = 25;

/// The six synthetic categories at their frozen defaults, 25 seeds each,
/// tagged SP/SR/SM/ST/SF/SC.
pub fn bundled_synthetic_specs() -> Vec<(String, SynthSpec)> {
    let mut specs = Vec::new();
    for category in SynthCategory::ALL {
        for seed in 0..BUNDLED_SEEDS_PER_CATEGORY {
            specs.push((
                super::category_tag(category).to_string(),
                SynthSpec::new(category, seed, BUNDLED_SIZE),
            ));
        }
    }
    specs
}

/// Thirty parameter-diverse terrains tagged RX, standing in for the
/// spread of real-world samples: categories, reliefs, octaves, and
/// erosion strengths all vary, which keeps their landform histograms far
/// more dispersed than any single synthetic category.
pub fn bundled_reference_specs() -> Vec<(String, SynthSpec)> {
    let mut specs = Vec::new();
    for i in 0..30u64 {
        let category = SynthCategory::ALL[(i % 6) as usize];
        let mut spec = SynthSpec::new(category, 1000 + i, BUNDLED_SIZE);
        // Spread the parameter space deterministically.
        spec.relief_m = 250.0 + 110.0 * (i % 11) as f64;
        spec.frequency = 2.0 + 0.7 * (i % 7) as f64;
        spec.octaves = 3 + (i % 5) as u32;
        spec.gain = 0.38 + 0.05 * (i % 6) as f64;
        spec.roughness = 0.55 + 0.08 * (i % 6) as f64;
        spec.talus_deg = 22.0 + 3.0 * (i % 5) as f64;
        spec.iterations = 60 + 40 * (i % 4) as u32;
        spec.rain_rate = 0.006 + 0.004 * (i % 3) as f64;
        spec.sea_level_fraction = 0.2 + 0.1 * (i % 4) as f64;
        specs.push((format!("RX{}", i % 5), spec));
    }
    specs
}

/// Synthetic plus reference specs, the corpus behind the shipped
/// normalization bounds.
pub fn bundled_all_specs() -> Vec<(String, SynthSpec)> {
    let mut specs = bundled_synthetic_specs();
    specs.extend(bundled_reference_specs());
    specs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_specs_are_valid_and_stable() {
        let all = bundled_all_specs();
        assert_eq!(all.len(), 6 * 25 + 30);
        for (tag, spec) in &all {
            spec.validate().unwrap_or_else(|e| panic!("{tag}: {e}"));
            assert_eq!(spec.size, BUNDLED_SIZE);
        }
        // Frozen corpus: the same call must yield the same specs.
        assert_eq!(bundled_all_specs(), all);
    }
}
