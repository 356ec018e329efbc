use std::fs;
use std::path::Path;

use dort::config::{ExperimentConfig, SpectrumScale};
use dort::formats::{read_eigenvalues, read_operator, write_operator, write_pgm};
use dort::pipeline::{assemble, run_experiment, simulate, RunError};
use dort::scenes::{builtin, BUILTIN};
use dort_core::dort::Cavity;
use dort_core::imaging::{herglotz_image, GridSpec};
use dort_core::mie::DiskCavity;
use dort_core::Vec2;
use proptest::prelude::*;

fn small_scene(out: &Path) -> ExperimentConfig {
    let mut cfg = builtin("example2-asym").unwrap();
    cfg.n_directions = 48;
    cfg.imaging = GridSpec::square(6.0, 0.5);
    cfg.outputs = out.to_path_buf();
    cfg
}

fn assert_complete(r: &dort::RunReport) {
    assert!(r.eigenvalues_path.is_file());
    assert!(r.report_path.is_file());
    assert_eq!(r.images.len(), r.significant_count);
    for (k, img) in r.images.iter().enumerate() {
        assert_eq!(img.index, k + 1);
        assert!(img.pgm.is_file());
        if let Some(csv) = &img.csv {
            assert!(csv.is_file());
        }
    }
}

#[test]
fn builtin_scenes_are_valid() {
    for name in BUILTIN {
        let cfg = builtin(name).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_directions, 360);
    }
    assert!(builtin("example9").is_none());
    let nine = builtin("example3-nine-disks").unwrap();
    assert_eq!(nine.cavities.len(), 9);
    assert_eq!(nine.imaging, GridSpec::square(16.0, 0.1));
    assert_eq!(builtin("example4-open-trm").unwrap().aperture.len(), 2);
}

#[test]
fn example1_disk_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = builtin("example1-disk").unwrap();
    cfg.outputs = dir.path().to_path_buf();
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.significant_count, 5);
    assert!((r.leading_eigenvalues[0] / 0.005021 - 1.0).abs() < 0.05, "{}", r.leading_eigenvalues[0]);
    assert!(r.checks.normality < 1e-8 && r.checks.reciprocity.unwrap() < 1e-8);
    assert_complete(&r);
    let stored = read_eigenvalues(&r.eigenvalues_path).unwrap();
    assert_eq!(stored.len(), 720);
    assert_eq!(&stored[..30], r.leading_eigenvalues.as_slice());
}

#[test]
fn example4_open_trm_reports_aperture_mode() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = builtin("example4-open-trm").unwrap();
    cfg.outputs = dir.path().to_path_buf();
    cfg.map_csv = false;
    let r = run_experiment(&cfg).unwrap();
    assert!(r.aperture_mode);
    assert_eq!(r.retained_directions, 180);
    assert!(r.significant_count > 0);
    assert_complete(&r);
    let text = fs::read_to_string(&r.report_path).unwrap();
    assert!(text.contains("aperture_mode = true"));
}

#[test]
fn engine_mismatch_is_a_config_error() {
    let mut cfg = builtin("example1-peanuthull").unwrap();
    cfg.engine = dort::EngineKind::Mie;
    let e = assemble(&cfg).unwrap_err();
    assert!(matches!(e, RunError::Config(_)), "{e}");
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn ill_conditioned_scene_is_a_numerical_error() {
    let cfg = ExperimentConfig::new("tiny", vec![Cavity::Disk(DiskCavity::new(Vec2::zeros(), 1e-9).unwrap())]);
    let e = assemble(&cfg).unwrap_err();
    assert_eq!(e.exit_code(), 3, "{e}");
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, b"x").unwrap();
    let cfg = small_scene(&blocker.join("sub"));
    assert!(matches!(run_experiment(&cfg).unwrap_err(), RunError::Io { .. }));
}

#[test]
fn operator_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_scene(dir.path());
    cfg.aperture = dort_core::dort::opposite_arcs().to_vec();
    let (_, f) = simulate(&cfg).unwrap();
    let path = dir.path().join("op.bin");
    write_operator(&path, &f).unwrap();
    assert_eq!(read_operator(&path).unwrap(), f);
    fs::write(&path, b"garbage!").unwrap();
    assert!(read_operator(&path).is_err());
}

#[test]
fn pgm_normalizes_each_map() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_scene(dir.path());
    let (_, f) = simulate(&cfg).unwrap();
    let es = dort_core::dort::eigensystem(&f);
    let map = herglotz_image(&cfg.medium, &es.eigenvectors[0], &cfg.imaging).unwrap();
    let path = dir.path().join("m.pgm");
    write_pgm(&path, &map).unwrap();
    let bytes = fs::read(&path).unwrap();
    let header = b"P5\n25 25\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    let px = &bytes[header.len()..];
    assert_eq!(px.len(), 625);
    assert_eq!(*px.iter().max().unwrap(), 255);
}

#[test]
fn weighted_scale_changes_values_not_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_scene(&dir.path().join("w"));
    cfg.spectrum = SpectrumScale::Weighted;
    cfg.noise_level = 0.0;
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.significant_count, 10);
    assert_complete(&r);
}

fn csv_bytes(r: &dort::RunReport) -> Vec<Vec<u8>> {
    let mut v = vec![fs::read(&r.eigenvalues_path).unwrap()];
    v.extend(r.images.iter().map(|i| fs::read(i.csv.as_ref().unwrap()).unwrap()));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn identical_configs_give_identical_csv(seed in 0u64..1000, noise in 0.0f64..0.2) {
        let dir = tempfile::tempdir().unwrap();
        let mut a = small_scene(&dir.path().join("a"));
        a.seed = seed;
        a.noise_level = noise;
        let mut b = a.clone();
        b.outputs = dir.path().join("b");
        let (ra, rb) = (run_experiment(&a).unwrap(), run_experiment(&b).unwrap());
        prop_assert_eq!(csv_bytes(&ra), csv_bytes(&rb));
        assert_complete(&ra);
    }
}
