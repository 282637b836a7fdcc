//! End-to-end tests of the command-line surface: subcommands, exit codes,
//! output formats, and determinism across reruns and thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn toolkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_terrain-toolkit"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = toolkit().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_flat_asc(path: &Path, size: usize, value: f64) {
    let field = terrain_toolkit::raster::HeightField::filled(size, size, 200.0, value);
    terrain_toolkit::raster::save_dem(
        &field,
        path,
        terrain_toolkit::raster::DemFormat::EsriAscii,
    )
    .unwrap();
}

#[test]
fn unknown_flags_exit_one_with_usage_on_stderr() {
    let out = toolkit().args(["--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let nonsense = toolkit().args(["dem", "explode"]).output().unwrap();
    assert_eq!(nonsense.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    let help = toolkit().args(["--help"]).output().unwrap();
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("geomorphon"));
    let version = toolkit().args(["--version"]).output().unwrap();
    assert_eq!(version.status.code(), Some(0));
}

#[test]
fn missing_input_file_exits_one() {
    let out = toolkit()
        .args(["dem", "info", "--dem", "/nonexistent/terrain.asc"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn flat_terrain_scores_zero_with_main_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let dem = dir.path().join("flat.asc");
    write_flat_asc(&dem, 64, 150.0);
    let out = run_ok(&["score", "--dem", dem.to_str().unwrap(), "--calibration", "ptrm-main"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.000000");
}

#[test]
fn dem_info_reports_dimensions_and_voids() {
    let dir = tempfile::tempdir().unwrap();
    let dem = dir.path().join("grid.asc");
    std::fs::write(
        &dem,
        "ncols 3\nnrows 2\ncellsize 90\nNODATA_value -9999\n1 2 -9999\n4 5 6\n",
    )
    .unwrap();
    let out = run_ok(&["dem", "info", "--dem", dem.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("size: 3 x 2"));
    assert!(text.contains("cell_size_m: 90"));
    assert!(text.contains("voids: 1"));
}

#[test]
fn dem_pipeline_convert_resample_fill_hillshade() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src.asc");
    std::fs::write(
        &src,
        "ncols 4\nnrows 4\ncellsize 100\nNODATA_value -9999\n\
         1 2 3 4\n2 -9999 4 5\n3 4 5 6\n4 5 6 7\n",
    )
    .unwrap();

    let filled = dir.path().join("filled.asc");
    run_ok(&["dem", "fillvoids", "--dem", src.to_str().unwrap(), "-o", filled.to_str().unwrap()]);

    let resampled = dir.path().join("up.asc");
    run_ok(&[
        "dem", "resample", "--dem", filled.to_str().unwrap(), "--target", "8", "-o",
        resampled.to_str().unwrap(),
    ]);
    let up = terrain_toolkit::raster::load_dem(
        &resampled,
        terrain_toolkit::raster::DemFormat::EsriAscii,
    )
    .unwrap();
    assert_eq!((up.width(), up.height()), (8, 8));

    let pgm = dir.path().join("out.pgm");
    run_ok(&["dem", "convert", "--dem", resampled.to_str().unwrap(), "-o", pgm.to_str().unwrap()]);
    assert!(pgm.exists());
    assert!(dir.path().join("out.pgm.json").exists());

    let shade = dir.path().join("shade.pgm");
    run_ok(&["dem", "hillshade", "--dem", resampled.to_str().unwrap(), "-o", shade.to_str().unwrap()]);
    assert!(shade.exists());
}

#[test]
fn geomorphon_classify_writes_map_legend_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let dem = dir.path().join("flat.asc");
    write_flat_asc(&dem, 48, 10.0);
    let map = dir.path().join("classes.pgm");
    let hist = dir.path().join("hist.json");
    run_ok(&[
        "geomorphon", "classify", "--dem", dem.to_str().unwrap(), "--search", "2", "--flat",
        "1.0", "--map", map.to_str().unwrap(), "--hist", hist.to_str().unwrap(),
    ]);

    let coverage: Vec<f64> =
        serde_json::from_str(&std::fs::read_to_string(&hist).unwrap()).unwrap();
    assert_eq!(coverage.len(), 10);
    assert_eq!(coverage[2], 1.0); // all flat, canonical order

    let legend: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("classes.pgm.json")).unwrap())
            .unwrap();
    assert_eq!(legend["2"]["class"], "flat");

    let raster = terrain_toolkit::raster::GrayRaster::read_pgm(&map).unwrap();
    assert_eq!(raster.pixels[0], 255);
    assert_eq!(raster.pixels[24 * 48 + 24], 2);
}

#[test]
fn synth_is_deterministic_per_seed_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("a.asc", "1"), ("b.asc", "4"), ("c.asc", "2")] {
        let path = dir.path().join(name);
        run_ok(&[
            "synth", "thermal", "--seed", "7", "--size", "65", "--iterations", "60",
            "--threads", threads, "-o", path.to_str().unwrap(), "--quiet",
        ]);
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);

    let other = dir.path().join("other.asc");
    run_ok(&[
        "synth", "thermal", "--seed", "8", "--size", "65", "--iterations", "60", "-o",
        other.to_str().unwrap(), "--quiet",
    ]);
    assert_ne!(outputs[0], std::fs::read(&other).unwrap());
}

#[test]
fn synth_rejects_bad_category_and_fbm_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = toolkit()
        .args(["synth", "volcanic", "--seed", "1", "-o", dir.path().join("x.asc").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let fbm = toolkit()
        .args(["synth", "fbm", "--size", "512", "-o", dir.path().join("f.asc").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(fbm.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fbm.stderr).contains("2^k + 1"));
}

#[test]
fn rank_aggregates_votes_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let votes = dir.path().join("votes.csv");
    std::fs::write(
        &votes,
        "left_id,right_id,choice,rater_id\n\
         A,B,left,w1\nA,C,left,w2\nB,C,right,w3\nC,A,right,w4\nA,B,left,w5\n",
    )
    .unwrap();
    let ranks = dir.path().join("ranks.csv");
    run_ok(&["rank", "--votes", votes.to_str().unwrap(), "-o", ranks.to_str().unwrap()]);
    let text = std::fs::read_to_string(&ranks).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "id,win_count,score");
    assert_eq!(lines.next().unwrap(), "A,4,1");
    // A won 4, C won 1, B won 0.
    assert!(text.contains("C,1,0.25"));
    assert!(text.contains("B,0,0"));
}

#[test]
fn corpus_score_report_and_refit_round_trip() {
    let dir = tempfile::tempdir().unwrap();

    // Small mixed corpus.
    let mut entries = Vec::new();
    for seed in 0..7u64 {
        for category in ["noise", "ridged"] {
            let id = format!("{category}-{seed}");
            let path = dir.path().join(format!("{id}.asc"));
            run_ok(&[
                "synth", category, "--seed", &seed.to_string(), "--size", "65", "-o",
                path.to_str().unwrap(), "--quiet",
            ]);
            entries.push(serde_json::json!({
                "id": id,
                "path": path,
                "category": if category == "noise" { "SP" } else { "SR" },
            }));
        }
    }
    let manifest_path = dir.path().join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&serde_json::json!({ "entries": entries })).unwrap(),
    )
    .unwrap();

    let report_csv = dir.path().join("report.csv");
    let summary = dir.path().join("summary.json");
    run_ok(&[
        "corpus", "score", "--manifest", manifest_path.to_str().unwrap(), "-o",
        report_csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(), "--quiet",
    ]);
    let report = terrain_toolkit::corpus::ReportTable::from_csv(
        &std::fs::read_to_string(&report_csv).unwrap(),
    )
    .unwrap();
    assert_eq!(report.rows.len(), 14);
    assert_eq!(report.failed_count(), 0);
    let stats: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(stats.len(), 2);

    // Attach synthetic measured scores and refit through the CLI.
    let mut scored = report.clone();
    for (i, row) in scored.rows.iter_mut().enumerate() {
        row.measured_score = Some(0.1 + 0.05 * (i as f64) + row.coverage.unwrap()[8]);
    }
    let scored_path = dir.path().join("scored.csv");
    std::fs::write(&scored_path, scored.to_csv()).unwrap();
    let cal_path = dir.path().join("refit.json");
    run_ok(&[
        "refit", "--report", scored_path.to_str().unwrap(), "-o", cal_path.to_str().unwrap(),
        "--name", "cli-refit", "--quiet",
    ]);
    let cal = terrain_toolkit::metric::load_calibration(&cal_path).unwrap();
    assert_eq!(cal.name, "cli-refit");
    assert!(cal.divisor > 0.0);
}

#[test]
fn corpus_score_with_failures_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.asc");
    write_flat_asc(&good, 48, 5.0);
    let manifest_path = dir.path().join("manifest.json");
    std::fs::write(
        &manifest_path,
        serde_json::json!({
            "entries": [
                { "id": "good", "path": good, "category": "SP" },
                { "id": "gone", "path": dir.path().join("gone.asc"), "category": "SP" },
            ]
        })
        .to_string(),
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let out = toolkit()
        .args([
            "corpus", "score", "--manifest", manifest_path.to_str().unwrap(), "-o",
            report.to_str().unwrap(), "--quiet",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let table =
        terrain_toolkit::corpus::ReportTable::from_json(&std::fs::read_to_string(&report).unwrap())
            .unwrap();
    assert_eq!(table.failed_count(), 1);
}

#[test]
fn threads_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let dem = dir.path().join("flat.asc");
    write_flat_asc(&dem, 48, 1.0);
    let out = toolkit()
        .env("TERRAIN_TOOLKIT_THREADS", "2")
        .args(["score", "--dem", dem.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.000000");
}

#[test]
fn classify_on_parity_fixture_reproduces_golden_histogram() {
    let fixtures = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dem = fixtures.join("parity_fbm.asc");
    let golden = fixtures.join("parity_fbm_hist_L2_t1.json");
    assert!(dem.exists() && golden.exists(), "parity fixtures missing");

    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("hist.json");
    run_ok(&[
        "geomorphon", "classify", "--dem", dem.to_str().unwrap(), "--search", "2", "--flat",
        "1.0", "--hist", hist.to_str().unwrap(),
    ]);
    let got: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(&hist).unwrap()).unwrap();
    let want: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(&golden).unwrap()).unwrap();
    assert_eq!(got, want, "histogram diverges from the golden fixture");
}
