//! Recalibrate the realism metric on a corpus with measured perception
//! scores: normalize features, run the regression, and ship a new
//! calibration JSON.
//!
//! Run with: cargo run --example refit_calibration

use anyhow::Result;
use terrain_toolkit::corpus::{
    batch_score, category_tag, materialize_corpus, refit_calibration_with_fit, DivisorPolicy,
};
use terrain_toolkit::geomorphon::GeomorphonParams;
use terrain_toolkit::metric::{builtin, save_calibration};
use terrain_toolkit::synth::{SynthCategory, SynthSpec};

fn main() -> Result<()> {
    let out_dir = std::path::Path::new("target/examples/refit_calibration");
    std::fs::create_dir_all(out_dir)?;

    // Build and score a mixed corpus.
    let specs: Vec<(String, SynthSpec)> = SynthCategory::ALL
        .into_iter()
        .flat_map(|category| {
            (0..5u64).map(move |seed| {
                let size = if category == SynthCategory::Fbm { 129 } else { 128 };
                (
                    category_tag(category).to_string(),
                    SynthSpec::new(category, seed, size),
                )
            })
        })
        .collect();
    let manifest = materialize_corpus(&specs, &out_dir.join("dems"))?;
    let params = GeomorphonParams::default();
    let mut report = batch_score(&manifest, &params, &builtin("ptrm-main").expect("shipped"))?;

    // Pretend a perception study measured these terrains: here the shipped
    // model's own score plus a deterministic wobble stands in for the
    // normalized study scores.
    for (i, row) in report.rows.iter_mut().enumerate() {
        let wobble = ((i * 37 % 11) as f64 - 5.0) / 200.0;
        row.measured_score = Some((row.ptrm.unwrap() + wobble).clamp(0.0, 1.0));
    }

    let (calibration, fit) = refit_calibration_with_fit(
        &report,
        DivisorPolicy::SelfConsistent,
        params,
        "refit-demo",
        "refit example corpus",
    )?;
    let cal_path = out_dir.join("refit-demo.json");
    save_calibration(&calibration, &cal_path)?;

    println!(
        "refit over {} scored entries: r_squared {:.4}, std error {:.4}",
        report.rows.len(),
        fit.r_squared,
        fit.std_error
    );
    println!(
        "F({}, {}) = {:.2}, p = {:.3e}",
        fit.df_num, fit.df_den, fit.f_statistic, fit.p_value
    );
    println!("intercept {:.4}, divisor {:.4}", calibration.intercept, calibration.divisor);
    println!("weights:");
    for (class, weight) in terrain_toolkit::geomorphon::GeomorphonClass::ALL
        .iter()
        .zip(calibration.weights)
    {
        println!("  {:10} {weight:+.4}", class.name());
    }
    println!("calibration written to {}", cal_path.display());
    Ok(())
}
