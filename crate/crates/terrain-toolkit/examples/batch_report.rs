//! Score a whole corpus from a manifest and emit the per-entry report and
//! per-category statistics.
//!
//! Run with: cargo run --example batch_report

use anyhow::Result;
use terrain_toolkit::corpus::{
    batch_score, category_tag, emit_report, materialize_corpus, ReportFormat,
};
use terrain_toolkit::geomorphon::GeomorphonParams;
use terrain_toolkit::metric::builtin;
use terrain_toolkit::synth::{SynthCategory, SynthSpec};

fn main() -> Result<()> {
    let out_dir = std::path::Path::new("target/examples/batch_report");
    std::fs::create_dir_all(out_dir)?;

    // Four seeds of each category, written to disk like a real corpus.
    let specs: Vec<(String, SynthSpec)> = SynthCategory::ALL
        .into_iter()
        .flat_map(|category| {
            (0..4u64).map(move |seed| {
                let size = if category == SynthCategory::Fbm { 129 } else { 128 };
                (
                    category_tag(category).to_string(),
                    SynthSpec::new(category, seed, size),
                )
            })
        })
        .collect();
    let manifest = materialize_corpus(&specs, &out_dir.join("dems"))?;
    manifest.save(&out_dir.join("manifest.json"))?;

    let calibration = builtin("ptrm-main").expect("shipped");
    let report = batch_score(&manifest, &GeomorphonParams::default(), &calibration)?;
    emit_report(&report, &out_dir.join("report.csv"), ReportFormat::Csv)?;
    emit_report(&report, &out_dir.join("report.json"), ReportFormat::Json)?;

    println!(
        "scored {} entries ({} failed) -> {}",
        report.rows.len(),
        report.failed_count(),
        out_dir.join("report.csv").display()
    );
    println!("\ncategory     n   mean  median  stdev    min    max");
    for s in report.category_stats() {
        println!(
            "{:10} {:3}  {:.3}   {:.3}  {:.3}  {:.3}  {:.3}",
            s.category, s.count, s.mean, s.median, s.stdev, s.min, s.max
        );
    }
    Ok(())
}
