use super::*;

fn ramp_east(size: usize, cell_size: f64, grade: f64) -> HeightField {
    HeightField::from_fn(size, size, cell_size, |_, col| col as f64 * cell_size * grade).unwrap()
}

#[test]
fn constructor_rejects_length_mismatch() {
    assert!(HeightField::new(2, 2, 90.0, vec![0.0; 3], vec![false; 4]).is_err());
    assert!(HeightField::new(2, 2, 90.0, vec![0.0; 4], vec![false; 3]).is_err());
}

#[test]
fn constructor_rejects_bad_cell_size_and_nan() {
    assert!(HeightField::new(1, 1, 0.0, vec![0.0], vec![false]).is_err());
    assert!(HeightField::new(1, 1, -5.0, vec![0.0], vec![false]).is_err());
    assert!(HeightField::new(1, 1, 90.0, vec![f64::NAN], vec![false]).is_err());
    // A non-finite value under the void mask is normalized away, not an error.
    let f = HeightField::new(1, 1, 90.0, vec![f64::NAN], vec![true]).unwrap();
    assert_eq!(f.get(0, 0), 0.0);
}

#[test]
fn resample_rejects_target_below_two() {
    let field = HeightField::filled(8, 8, 90.0, 5.0);
    assert!(resample(&field, 1).is_err());
    assert!(resample(&field, 0).is_err());
}

#[test]
fn resample_constant_stays_constant() {
    let field = HeightField::filled(37, 37, 90.0, 123.45);
    for target in [2, 16, 64, 101] {
        let out = resample(&field, target).unwrap();
        assert_eq!((out.width(), out.height()), (target, target));
        assert!(out.elevations().iter().all(|&z| (z - 123.45).abs() < 1e-12));
    }
}

#[test]
fn resample_is_exact_on_linear_ramps() {
    // Bilinear interpolation reproduces affine surfaces; corner-to-corner
    // mapping makes the resampled ramp a ramp over the same span.
    let size = 97;
    let field = ramp_east(size, 90.0, 0.1);
    let target = 33;
    let out = resample(&field, target).unwrap();
    let span = (size - 1) as f64 * 90.0 * 0.1;
    for row in 1..target - 1 {
        for col in 1..target - 1 {
            let expected = col as f64 / (target - 1) as f64 * span;
            assert!(
                (out.get(row, col) - expected).abs() < 1e-9,
                "cell ({row},{col}): {} vs {}",
                out.get(row, col),
                expected
            );
        }
    }
}

#[test]
fn resample_sets_working_cell_size() {
    // A 1201-cell SRTM tile at 90 m resampled to 512 lands near the 200 m
    // working resolution (1201 * 90 / 512 = 211.11...).
    let field = HeightField::filled(1201, 1201, 90.0, 0.0);
    let out = resample(&field, 512).unwrap();
    assert!((out.cell_size() - 1201.0 * 90.0 / 512.0).abs() < 1e-9);
    assert_eq!(out.width(), 512);
}

#[test]
fn resample_propagates_voids_to_touching_footprints() {
    let mut voids = vec![false; 9 * 9];
    voids[4 * 9 + 4] = true;
    let field = HeightField::new(9, 9, 90.0, vec![1.0; 81], voids).unwrap();
    let out = resample(&field, 5).unwrap();
    // Output center maps exactly onto the void input cell.
    assert!(out.is_void(2, 2));
    // Corners are far from the void.
    assert!(!out.is_void(0, 0));
    assert!(!out.is_void(4, 4));
}

#[test]
fn fill_voids_uses_nearest_neighbor_and_is_explicit() {
    let mut voids = vec![false; 25];
    voids[12] = true; // center of a 5x5
    let mut z = vec![7.0; 25];
    z[12] = 0.0;
    let field = HeightField::new(5, 5, 90.0, z, voids).unwrap();
    let filled = fill_voids(&field).unwrap();
    assert!(!filled.has_voids());
    assert_eq!(filled.get(2, 2), 7.0);
    // Already-clean fields come back unchanged.
    let clean = fill_voids(&filled).unwrap();
    assert_eq!(clean, filled);
}

#[test]
fn fill_voids_rejects_all_void_fields() {
    let field = HeightField::new(3, 3, 90.0, vec![0.0; 9], vec![true; 9]).unwrap();
    assert!(fill_voids(&field).is_err());
}

#[test]
fn hillshade_flat_field_is_sin_altitude() {
    let field = HeightField::filled(16, 16, 200.0, 42.0);
    let shade = hillshade(&field, 315.0, 45.0);
    let expected = (255.0 * 45.0_f64.to_radians().sin()).round() as u8;
    assert_eq!(expected, 180);
    assert!(shade.pixels.iter().all(|&p| p == expected));
}

#[test]
fn hillshade_overhead_light_makes_flat_white() {
    let field = HeightField::filled(8, 8, 200.0, 0.0);
    let shade = hillshade(&field, 0.0, 90.0);
    assert!(shade.pixels.iter().all(|&p| p == 255));
}

#[test]
fn hillshade_slope_toward_light_is_brighter_than_flat() {
    // Light from the east (azimuth 90): an east-facing descent tilts the
    // normal toward the light, a west-facing descent away from it.
    let flat_value = (255.0 * 45.0_f64.to_radians().sin()).round() as u8;
    let toward = ramp_east(16, 200.0, -0.2); // descends eastward
    let away = ramp_east(16, 200.0, 0.2);
    let shade_toward = hillshade(&toward, 90.0, 45.0);
    let shade_away = hillshade(&away, 90.0, 45.0);
    let center = 8 * 16 + 8;
    assert!(shade_toward.pixels[center] > flat_value);
    assert!(shade_away.pixels[center] < flat_value);
}

#[test]
fn hillshade_renders_voids_black() {
    let mut voids = vec![false; 16];
    voids[5] = true;
    let field = HeightField::new(4, 4, 90.0, vec![10.0; 16], voids).unwrap();
    let shade = hillshade(&field, 315.0, 45.0);
    assert_eq!(shade.pixels[5], 0);
    assert_ne!(shade.pixels[0], 0);
}

#[test]
fn save_dem_refuses_hgt() {
    let dir = tempfile::tempdir().unwrap();
    let field = HeightField::filled(4, 4, 90.0, 1.0);
    assert!(save_dem(&field, &dir.path().join("x.hgt"), DemFormat::SrtmHgt).is_err());
}

#[test]
fn format_inference_from_extension() {
    assert_eq!(
        DemFormat::from_extension(Path::new("a/b/N48E015.HGT")),
        Some(DemFormat::SrtmHgt)
    );
    assert_eq!(
        DemFormat::from_extension(Path::new("x.asc")),
        Some(DemFormat::EsriAscii)
    );
    assert_eq!(DemFormat::from_extension(Path::new("x.pgm")), Some(DemFormat::Pgm16));
    assert_eq!(DemFormat::from_extension(Path::new("x.tif")), None);
}
