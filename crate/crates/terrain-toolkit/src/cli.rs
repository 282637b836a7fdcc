//! Command-line surface over the library. One subcommand per pipeline
//! stage; machine-readable output goes to stdout or files, diagnostics to
//! stderr. Exit codes: 0 success, 1 input error, 2 when a batch finished
//! but some entries failed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    batch_score, emit_report, refit_calibration_with_fit, CorpusManifest, DivisorPolicy,
    ReportFormat, ReportTable,
};
use crate::error::{Result, TerrainError};
use crate::geomorphon::{classify_map, histogram, legend_json, GeomorphonParams};
use crate::metric::{normalize_features, ptrm_score, resolve_calibration};
use crate::raster::{
    fill_voids, hillshade, load_dem, resample, save_dem, DemFormat, HeightField,
};
use crate::stats::{rank_from_votes, read_votes_csv, write_ranks_csv};
use crate::synth::{SynthCategory, SynthSpec};

/// Env var consulted for the worker count when --threads is absent.
pub const THREADS_ENV: &str = "TERRAIN_TOOLKIT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "terrain-toolkit",
    version,
    about = "Geomorphon landform classification, realism scoring, and synthetic terrain"
)]
struct Cli {
    /// Worker threads (default: all cores; TERRAIN_TOOLKIT_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Default seed for subcommands that generate terrain.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress progress diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect and transform DEM files.
    Dem {
        #[command(subcommand)]
        command: DemCommand,
    },
    /// Landform classification.
    Geomorphon {
        #[command(subcommand)]
        command: GeomorphonCommand,
    },
    /// Score a DEM's perceived realism.
    Score(ScoreArgs),
    /// Generate synthetic terrain.
    Synth(SynthArgs),
    /// Aggregate 2AFC votes into normalized scores.
    Rank(RankArgs),
    /// Refit a calibration from a scored report.
    Refit(RefitArgs),
    /// Batch operations over a corpus manifest.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand, Debug)]
enum DemCommand {
    /// Print size, cell size, elevation range, and void count.
    Info {
        #[arg(long)]
        dem: PathBuf,
    },
    /// Convert between formats (by file extension: .hgt, .asc, .pgm).
    Convert {
        #[arg(long)]
        dem: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Bilinear resample to a square grid.
    Resample {
        #[arg(long)]
        dem: PathBuf,
        /// Cells per side of the output.
        #[arg(long, default_value_t = crate::raster::WORKING_RESOLUTION)]
        target: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fill voids from the nearest non-void neighbor.
    Fillvoids {
        #[arg(long)]
        dem: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Lambertian hillshade preview as 8-bit PGM.
    Hillshade {
        #[arg(long)]
        dem: PathBuf,
        #[arg(long, default_value_t = 315.0)]
        azimuth: f64,
        #[arg(long, default_value_t = 45.0)]
        altitude: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum GeomorphonCommand {
    /// Classify every cell and export the map and/or histogram.
    Classify {
        #[arg(long)]
        dem: PathBuf,
        /// Search radius L in cells.
        #[arg(long, default_value_t = 2)]
        search: usize,
        /// Flatness threshold t in degrees.
        #[arg(long, default_value_t = 1.0)]
        flat: f64,
        /// Indexed 8-bit PGM output (legend written to <map>.json).
        #[arg(long)]
        map: Option<PathBuf>,
        /// Coverage histogram as a JSON 10-vector in canonical order.
        #[arg(long)]
        hist: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    dem: PathBuf,
    /// Built-in name (ptrm-main, ptrm-validation) or a calibration JSON path.
    #[arg(long, default_value = "ptrm-main")]
    calibration: String,
    /// Override the calibration's search radius.
    #[arg(long)]
    search: Option<usize>,
    /// Override the calibration's flatness threshold.
    #[arg(long)]
    flat: Option<f64>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// noise | ridged | fbm | thermal | fluvial | coastal
    category: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Cells per side (fbm needs 2^k + 1, e.g. 513).
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long)]
    relief: Option<f64>,
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long)]
    octaves: Option<u32>,
    #[arg(long)]
    lacunarity: Option<f64>,
    #[arg(long)]
    gain: Option<f64>,
    #[arg(long)]
    roughness: Option<f64>,
    #[arg(long)]
    talus: Option<f64>,
    #[arg(long)]
    iterations: Option<u32>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    rain: Option<f64>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    dissolve: Option<f64>,
    #[arg(long)]
    deposit: Option<f64>,
    #[arg(long)]
    evaporation: Option<f64>,
    #[arg(long)]
    sea_level: Option<f64>,
    #[arg(long)]
    band: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct RankArgs {
    /// CSV with header left_id,right_id,choice,rater_id.
    #[arg(long)]
    votes: PathBuf,
    /// Output CSV: id,win_count,score.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct RefitArgs {
    /// Report CSV or JSON with a measured_score column.
    #[arg(long)]
    report: PathBuf,
    /// Calibration JSON output.
    #[arg(short, long)]
    output: PathBuf,
    /// "self" for intercept + sum(weights), or a fixed number.
    #[arg(long, default_value = "self")]
    divisor: String,
    #[arg(long, default_value = "refit")]
    name: String,
    /// Geomorphon search radius recorded in the calibration.
    #[arg(long, default_value_t = 2)]
    search: usize,
    /// Flatness threshold recorded in the calibration.
    #[arg(long, default_value_t = 1.0)]
    flat: f64,
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// Classify and score every manifest entry into a report.
    Score {
        /// Manifest JSON: {"entries": [{id, path, category, measured_score?}]}.
        #[arg(long)]
        manifest: PathBuf,
        /// Report output; .csv or .json by extension.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "ptrm-main")]
        calibration: String,
        #[arg(long)]
        search: Option<usize>,
        #[arg(long)]
        flat: Option<f64>,
        /// Optional per-category statistics JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

/// Parse argv and run. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful output, not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let outcome = match threads {
        Some(n) if n > 0 => {
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| dispatch(&cli)),
                Err(e) => Err(TerrainError::InvalidParameter(format!(
                    "cannot build a {n}-thread pool: {e}"
                ))),
            }
        }
        _ => dispatch(&cli),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn note(quiet: bool, message: &str) {
    if !quiet {
        eprintln!("{message}");
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Dem { command } => run_dem(command, cli.quiet),
        Command::Geomorphon { command } => run_geomorphon(command, cli.quiet),
        Command::Score(args) => run_score(args, cli.quiet),
        Command::Synth(args) => run_synth(args, cli.seed, cli.quiet),
        Command::Rank(args) => run_rank(args, cli.quiet),
        Command::Refit(args) => run_refit(args, cli.quiet),
        Command::Corpus { command } => run_corpus(command, cli.quiet),
    }
}

fn load_by_extension(path: &Path) -> Result<HeightField> {
    let format = DemFormat::from_extension(path).ok_or_else(|| {
        TerrainError::InvalidParameter(format!(
            "cannot infer DEM format from extension of {}",
            path.display()
        ))
    })?;
    load_dem(path, format)
}

fn save_by_extension(field: &HeightField, path: &Path) -> Result<()> {
    let format = DemFormat::from_extension(path).ok_or_else(|| {
        TerrainError::InvalidParameter(format!(
            "cannot infer DEM format from extension of {}",
            path.display()
        ))
    })?;
    save_dem(field, path, format)
}

fn run_dem(command: &DemCommand, quiet: bool) -> Result<i32> {
    match command {
        DemCommand::Info { dem } => {
            let field = load_by_extension(dem)?;
            let (lo, hi) = field.min_max().unwrap_or((f64::NAN, f64::NAN));
            let voids = field.void_count();
            println!("path: {}", dem.display());
            println!("size: {} x {}", field.width(), field.height());
            println!("cell_size_m: {}", field.cell_size());
            println!("min_m: {lo}");
            println!("max_m: {hi}");
            println!(
                "voids: {voids} ({:.3}%)",
                100.0 * voids as f64 / field.len() as f64
            );
            Ok(0)
        }
        DemCommand::Convert { dem, output } => {
            let field = load_by_extension(dem)?;
            save_by_extension(&field, output)?;
            note(quiet, &format!("wrote {}", output.display()));
            Ok(0)
        }
        DemCommand::Resample { dem, target, output } => {
            let field = load_by_extension(dem)?;
            let resampled = resample(&field, *target)?;
            save_by_extension(&resampled, output)?;
            note(
                quiet,
                &format!(
                    "resampled {} -> {target} cells per side, cell size {:.3} m",
                    field.width(),
                    resampled.cell_size()
                ),
            );
            Ok(0)
        }
        DemCommand::Fillvoids { dem, output } => {
            let field = load_by_extension(dem)?;
            let voids = field.void_count();
            let filled = fill_voids(&field)?;
            save_by_extension(&filled, output)?;
            note(quiet, &format!("filled {voids} void cells"));
            Ok(0)
        }
        DemCommand::Hillshade {
            dem,
            azimuth,
            altitude,
            output,
        } => {
            let field = load_by_extension(dem)?;
            hillshade(&field, *azimuth, *altitude).write_pgm(output)?;
            note(quiet, &format!("wrote {}", output.display()));
            Ok(0)
        }
    }
}

fn run_geomorphon(command: &GeomorphonCommand, quiet: bool) -> Result<i32> {
    match command {
        GeomorphonCommand::Classify {
            dem,
            search,
            flat,
            map,
            hist,
        } => {
            let params = GeomorphonParams::new(*search, *flat)?;
            let field = load_by_extension(dem)?;
            let field = if field.has_voids() {
                note(quiet, &format!("filling {} voids", field.void_count()));
                fill_voids(&field)?
            } else {
                field
            };
            let classified = classify_map(&field, &params)?;
            if let Some(map_path) = map {
                classified.to_gray_raster().write_pgm(map_path)?;
                let legend_path = sidecar_json(map_path);
                std::fs::write(
                    &legend_path,
                    serde_json::to_string_pretty(&legend_json()).expect("legend serializes"),
                )
                .map_err(|e| TerrainError::io(&legend_path, e))?;
                note(quiet, &format!("wrote {}", map_path.display()));
            }
            let coverage = histogram(&classified)?;
            if let Some(hist_path) = hist {
                std::fs::write(
                    hist_path,
                    serde_json::to_string(&coverage.coverage.to_vec())
                        .expect("histogram serializes"),
                )
                .map_err(|e| TerrainError::io(hist_path, e))?;
                note(quiet, &format!("wrote {}", hist_path.display()));
            }
            if map.is_none() && hist.is_none() {
                println!(
                    "{}",
                    serde_json::to_string(&coverage.coverage.to_vec()).expect("serializes")
                );
            }
            Ok(0)
        }
    }
}

fn sidecar_json(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

fn run_score(args: &ScoreArgs, quiet: bool) -> Result<i32> {
    let mut calibration = resolve_calibration(&args.calibration)?;
    if let Some(search) = args.search {
        calibration.geomorphon.search_radius_cells = search;
    }
    if let Some(flat) = args.flat {
        calibration.geomorphon.flatness_deg = flat;
    }
    calibration.validate()?;

    let field = load_by_extension(&args.dem)?;
    let field = if field.has_voids() {
        note(quiet, &format!("filling {} voids", field.void_count()));
        fill_voids(&field)?
    } else {
        field
    };
    let map = classify_map(&field, &calibration.geomorphon)?;
    let coverage = histogram(&map)?;
    let features = normalize_features(&coverage, &calibration);
    println!("{:.6}", ptrm_score(&features, &calibration));
    Ok(0)
}

fn run_synth(args: &SynthArgs, global_seed: Option<u64>, quiet: bool) -> Result<i32> {
    let category = SynthCategory::parse(&args.category).ok_or_else(|| {
        TerrainError::InvalidParameter(format!(
            "unknown category {}; expected noise|ridged|fbm|thermal|fluvial|coastal",
            args.category
        ))
    })?;
    let seed = args.seed.or(global_seed).unwrap_or(0);
    let mut spec = SynthSpec::new(category, seed, args.size);
    if let Some(v) = args.relief {
        spec.relief_m = v;
    }
    if let Some(v) = args.frequency {
        spec.frequency = v;
    }
    if let Some(v) = args.octaves {
        spec.octaves = v;
    }
    if let Some(v) = args.lacunarity {
        spec.lacunarity = v;
    }
    if let Some(v) = args.gain {
        spec.gain = v;
    }
    if let Some(v) = args.roughness {
        spec.roughness = v;
    }
    if let Some(v) = args.talus {
        spec.talus_deg = v;
    }
    if let Some(v) = args.iterations {
        spec.iterations = v;
    }
    if let Some(v) = args.rate {
        spec.rate = v;
    }
    if let Some(v) = args.rain {
        spec.rain_rate = v;
    }
    if let Some(v) = args.capacity {
        spec.capacity_k = v;
    }
    if let Some(v) = args.dissolve {
        spec.dissolve_k = v;
    }
    if let Some(v) = args.deposit {
        spec.deposit_k = v;
    }
    if let Some(v) = args.evaporation {
        spec.evaporation = v;
    }
    if let Some(v) = args.sea_level {
        spec.sea_level_fraction = v;
    }
    if let Some(v) = args.band {
        spec.band_m = v;
    }
    let field = spec.generate()?;
    save_by_extension(&field, &args.output)?;
    note(
        quiet,
        &format!(
            "generated {category} terrain, seed {seed}, {0}x{0} cells -> {1}",
            args.size,
            args.output.display()
        ),
    );
    Ok(0)
}

fn run_rank(args: &RankArgs, quiet: bool) -> Result<i32> {
    let votes = read_votes_csv(&args.votes)?;
    let table = rank_from_votes(&votes)?;
    write_ranks_csv(&table, &args.output)?;
    note(
        quiet,
        &format!(
            "ranked {} terrains from {} votes -> {}",
            table.entries.len(),
            votes.len(),
            args.output.display()
        ),
    );
    Ok(0)
}

fn run_refit(args: &RefitArgs, quiet: bool) -> Result<i32> {
    let text =
        std::fs::read_to_string(&args.report).map_err(|e| TerrainError::io(&args.report, e))?;
    let report = match ReportFormat::from_extension(&args.report) {
        Some(ReportFormat::Json) => ReportTable::from_json(&text)?,
        _ => ReportTable::from_csv(&text)?,
    };
    let policy = if args.divisor == "self" {
        DivisorPolicy::SelfConsistent
    } else {
        let value: f64 = args.divisor.parse().map_err(|_| {
            TerrainError::InvalidParameter(format!(
                "--divisor must be 'self' or a number, got {}",
                args.divisor
            ))
        })?;
        DivisorPolicy::Fixed(value)
    };
    let params = GeomorphonParams::new(args.search, args.flat)?;
    let (calibration, fit) = refit_calibration_with_fit(
        &report,
        policy,
        params,
        &args.name,
        &format!("refit from {}", args.report.display()),
    )?;
    crate::metric::save_calibration(&calibration, &args.output)?;
    note(
        quiet,
        &format!(
            "refit {}: r_squared {:.4}, std_error {:.4}, F({}, {}) = {:.2}, p = {:.3e}",
            args.output.display(),
            fit.r_squared,
            fit.std_error,
            fit.df_num,
            fit.df_den,
            fit.f_statistic,
            fit.p_value
        ),
    );
    Ok(0)
}

fn run_corpus(command: &CorpusCommand, quiet: bool) -> Result<i32> {
    match command {
        CorpusCommand::Score {
            manifest,
            output,
            calibration,
            search,
            flat,
            summary,
        } => {
            let manifest = CorpusManifest::load(manifest)?;
            let mut cal = resolve_calibration(calibration)?;
            if let Some(search) = search {
                cal.geomorphon.search_radius_cells = *search;
            }
            if let Some(flat) = flat {
                cal.geomorphon.flatness_deg = *flat;
            }
            cal.validate()?;
            let report = batch_score(&manifest, &cal.geomorphon, &cal)?;
            let format = ReportFormat::from_extension(output).unwrap_or(ReportFormat::Csv);
            emit_report(&report, output, format)?;
            if let Some(summary_path) = summary {
                let stats = report.category_stats();
                std::fs::write(
                    summary_path,
                    serde_json::to_string_pretty(&stats).expect("stats serialize"),
                )
                .map_err(|e| TerrainError::io(summary_path, e))?;
            }
            let failed = report.failed_count();
            note(
                quiet,
                &format!(
                    "scored {} entries ({failed} failed) -> {}",
                    report.rows.len(),
                    output.display()
                ),
            );
            if !quiet {
                for s in report.category_stats() {
                    eprintln!(
                        "  {:10} n={:3} mean={:.3} median={:.3} stdev={:.3} min={:.3} max={:.3}",
                        s.category, s.count, s.mean, s.median, s.stdev, s.min, s.max
                    );
                }
            }
            Ok(if failed > 0 { 2 } else { 0 })
        }
    }
}
