//! The raster pipeline end to end: write a DEM with voids, load it back,
//! fill the voids, resample to the working resolution, and render a
//! hillshade preview.
//!
//! Run with: cargo run --example dem_pipeline

use anyhow::Result;
use terrain_toolkit::raster::{
    fill_voids, hillshade, load_dem, resample, save_dem, DemFormat, HeightField,
};
use terrain_toolkit::synth::{SynthCategory, SynthSpec};

fn main() -> Result<()> {
    let out_dir = std::path::Path::new("target/examples/dem_pipeline");
    std::fs::create_dir_all(out_dir)?;

    // A synthetic "survey tile" with a few void patches, as SRTM data has.
    let base = SynthSpec::new(SynthCategory::Fbm, 9, 257).generate()?;
    let voids: Vec<bool> = (0..base.len())
        .map(|i| {
            let (row, col) = (i / base.width(), i % base.width());
            (60..70).contains(&row) && (100..140).contains(&col)
                || (180..185).contains(&row) && (30..90).contains(&col)
        })
        .collect();
    let tile = HeightField::new(
        base.width(),
        base.height(),
        90.0, // pretend 3 arc-second source resolution
        base.elevations().to_vec(),
        voids,
    )?;
    let tile_path = out_dir.join("survey.asc");
    save_dem(&tile, &tile_path, DemFormat::EsriAscii)?;

    let loaded = load_dem(&tile_path, DemFormat::EsriAscii)?;
    println!(
        "loaded {}: {}x{} at {} m/cell, {} voids",
        tile_path.display(),
        loaded.width(),
        loaded.height(),
        loaded.cell_size(),
        loaded.void_count()
    );
    assert_eq!(loaded, tile); // the ASCII round trip is exact

    // Voids must be filled explicitly before any analysis.
    let filled = fill_voids(&loaded)?;
    println!("filled {} void cells from nearest neighbors", loaded.void_count());

    // Resample toward the 200 m working scale the calibrations assume.
    let working = resample(&filled, 116)?;
    println!(
        "resampled {}x{} @ {} m -> {}x{} @ {:.1} m",
        filled.width(),
        filled.height(),
        filled.cell_size(),
        working.width(),
        working.height(),
        working.cell_size()
    );

    // Also store the compact quantized form with its bounds sidecar.
    save_dem(&working, &out_dir.join("working.pgm"), DemFormat::Pgm16)?;
    hillshade(&working, 315.0, 45.0).write_pgm(&out_dir.join("working_hillshade.pgm"))?;
    println!("wrote working.pgm (+ .json sidecar) and working_hillshade.pgm");
    Ok(())
}
