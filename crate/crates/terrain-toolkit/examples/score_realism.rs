//! Score the perceived realism of terrains with the shipped calibrations.
//!
//! Run with: cargo run --example score_realism

use anyhow::Result;
use terrain_toolkit::geomorphon::{histogram_of, GeomorphonParams};
use terrain_toolkit::metric::{
    builtin, normalize_features, ptrm_raw, ptrm_score, MAIN_CALIBRATION, VALIDATION_CALIBRATION,
};
use terrain_toolkit::synth::{SynthCategory, SynthSpec};

fn main() -> Result<()> {
    let main = builtin(MAIN_CALIBRATION).expect("shipped");
    let validation = builtin(VALIDATION_CALIBRATION).expect("shipped");
    let params = GeomorphonParams::default();

    println!("category   seed   {MAIN_CALIBRATION}   {VALIDATION_CALIBRATION}   raw");
    for category in SynthCategory::ALL {
        let size = if category == SynthCategory::Fbm { 257 } else { 256 };
        for seed in [1, 2] {
            let field = SynthSpec::new(category, seed, size).generate()?;
            let hist = histogram_of(&field, &params)?;
            let features = normalize_features(&hist, &main);
            println!(
                "{:8}   {seed}      {:.3}       {:.3}            {:+.3}",
                category.name(),
                ptrm_score(&features, &main),
                ptrm_score(&normalize_features(&hist, &validation), &validation),
                ptrm_raw(&features, &main),
            );
        }
    }

    println!();
    println!(
        "the score is (intercept + weights . normalized coverages) / divisor, clamped to [0, 1];"
    );
    println!(
        "normalization bounds come from the bundled corpus recorded in the calibration: {}",
        main.provenance
    );
    Ok(())
}
