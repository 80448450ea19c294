use onewave::cli::{
    self, cmd_coeffs, cmd_image, cmd_polygon, cmd_synthesize, preset, Artifacts, AxisSpec, CliError, FamilySpec,
    RunConfig, PRESETS,
};
use onewave::factorization::{ProbeKind, Variant};
use onewave::forward::{dtn_empty_disk, read_cauchy_json, Object};
use onewave::geometry::Curve;
use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

fn keys(v: &toml::Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        toml::Value::Table(t) => {
            for (k, x) in t {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                out.insert(p.clone());
                keys(x, &p, out);
            }
        }
        toml::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                keys(x, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => {}
    }
}

#[test]
fn presets_parse_validate_and_spell_out_every_field() {
    for (name, text) in PRESETS {
        let cfg = RunConfig::from_toml(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(cfg.name, *name);
        for (_, run) in cfg.expand() {
            run.validate().unwrap();
        }
        let written: toml::Value = toml::from_str(text).unwrap();
        let resolved: toml::Value = toml::from_str(&cfg.to_toml()).unwrap();
        let (mut have, mut need) = (BTreeSet::new(), BTreeSet::new());
        keys(&written, "", &mut have);
        keys(&resolved, "", &mut need);
        let missing: Vec<_> = need.difference(&have).collect();
        assert!(missing.is_empty(), "{name} relies on defaults for {missing:?}");
    }
}

#[test]
fn config_round_trips_through_toml() {
    for (name, _) in PRESETS {
        let cfg = preset(name).unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}

#[test]
fn unknown_fields_are_config_errors() {
    let text = PRESETS[0].1.replace("outer_radius = 5.0", "outer_radius = 5.0\nradius = 1.0");
    assert!(matches!(RunConfig::from_toml(&text), Err(CliError::Config(_))));
}

#[test]
fn ex2_truth_synthesis_matches_the_fixture_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_synthesize(&preset("ex2-truth").unwrap(), &mut art).unwrap();
    let fresh = std::fs::read(dir.path().join("data.json")).unwrap();
    let fixture = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ex2-truth.json")).unwrap();
    assert!(fresh == fixture, "synthesized data differ from the frozen fixture");
}

#[test]
fn empty_preset_gives_the_empty_disk_flux() {
    let cfg = preset("empty").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_synthesize(&cfg, &mut art).unwrap();
    let data = read_cauchy_json(&dir.path().join("data.json")).unwrap();
    let expected = dtn_empty_disk(1.0, 5.0, 128).unwrap().apply(&data.f);
    assert!(data.g.sub(&expected).norm() <= 1e-14 * expected.norm());
}

#[test]
fn polygon_touching_the_circle_names_the_clearance_rule() {
    let mut cfg = preset("ex2-truth").unwrap();
    cfg.scenario.object = Object::Dirichlet {
        curve: Curve::polygon(vec![[0.25, -0.75], [5.0, -0.5], [5.0, 0.5], [0.5, 0.5]]).unwrap(),
    };
    let err = cfg.validate().unwrap_err();
    assert_eq!(err.exit_code(), cli::EXIT_CONFIG);
    let msg = err.to_string();
    assert!(msg.contains("scenario") && msg.contains("inside the outer radius"), "{msg}");
}

#[test]
fn blank_scenario_image_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_image(&preset("empty").unwrap(), None, &mut art).unwrap();
    let note = std::fs::read_to_string(dir.path().join("note.txt")).unwrap();
    assert!(note.contains("DegenerateOperator"));
    let csv = std::fs::read_to_string(dir.path().join("indicator.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",false")));
    let (manifest, _) = art.finish().unwrap();
    let m = std::fs::read_to_string(manifest).unwrap();
    for f in ["indicator.csv", "indicator.ppm", "indicator.svg", "note.txt", "config.toml"] {
        assert!(m.lines().any(|l| l.starts_with(&format!("{f},"))), "{f} missing from manifest");
    }
}

fn fixture() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/ex2-truth.json")
}

fn coarse_ex2(variant: Variant) -> RunConfig {
    let mut cfg = preset("ex2").unwrap();
    cfg.pipeline.variant = variant;
    let c = cfg.pipeline.coeffs.as_mut().unwrap();
    c.tau = AxisSpec { start: 0.9, step: 0.05, count: 5 };
    c.kappa = AxisSpec { start: 1.9, step: 0.05, count: 5 };
    cfg
}

fn argmax_row(dir: &Path) -> (f64, f64) {
    let text = std::fs::read_to_string(dir.join("argmax.csv")).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    (row[0], row[1])
}

#[test]
fn coarse_coefficient_grid_finds_the_truth_with_both_variants() {
    for variant in [Variant::Tilde, Variant::Classical] {
        let dir = tempfile::tempdir().unwrap();
        let mut art = Artifacts::new(dir.path());
        cmd_coeffs(&coarse_ex2(variant), Some(&fixture()), &mut art).unwrap();
        let (t, k) = argmax_row(dir.path());
        assert!((t - 1.0).abs() < 1e-12 && (k - 2.0).abs() < 1e-12, "{variant:?}: ({t}, {k})");
        let (manifest, _) = art.finish().unwrap();
        let m = std::fs::read_to_string(manifest).unwrap();
        assert!(m.contains("128 modes"));
        assert!(!m.contains("data.json"), "given data are not rewritten");
    }
}

#[test]
fn data_for_another_scenario_is_rejected() {
    let mut cfg = coarse_ex2(Variant::Tilde);
    cfg.scenario.q = 4.5;
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    let err = cmd_coeffs(&cfg, Some(&fixture()), &mut art).unwrap_err();
    assert_eq!(err.exit_code(), cli::EXIT_CONFIG);
}

#[test]
fn single_disk_family_and_manifest_wording() {
    let mut cfg = preset("ex3-centered").unwrap();
    let poly = cfg.pipeline.polygon.as_mut().unwrap();
    poly.families = vec![FamilySpec::Radial { center: [0.0, 0.0], first: 16, last: 16, step: 0.1 }];
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_polygon(&cfg, Some(&fixture()), &mut art).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("family-0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().ends_with(",true"));
    // one member cannot define a quantile threshold
    assert!(dir.path().join("hull-0.txt").exists());
    let (manifest, _) = art.finish().unwrap();
    let m = std::fs::read_to_string(manifest).unwrap();
    assert!(m.contains("eta=+ik on Omega; eta=-ik on Omega~"));
}

#[test]
fn lattice_manifest_records_the_center_formula() {
    let mut cfg = preset("ex4").unwrap();
    let poly = cfg.pipeline.polygon.as_mut().unwrap();
    poly.families.truncate(1);
    poly.probe = ProbeKind::Impedance;
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_polygon(&cfg, Some(&fixture()), &mut art).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("family-0.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10, "3x3 lattice for r = 1");
    let (manifest, _) = art.finish().unwrap();
    let m = std::fs::read_to_string(manifest).unwrap();
    assert!(m.contains("P_j=(2r*j1-2,2r*j2-2)"), "{m}");
}

#[test]
fn centered_family_hull_contains_the_corners() {
    let mut cfg = preset("ex3-centered").unwrap();
    cfg.pipeline.variant = Variant::Classical;
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    cmd_polygon(&cfg, Some(&fixture()), &mut art).unwrap();
    let text = std::fs::read_to_string(dir.path().join("hull-0.csv")).unwrap();
    let cells: Vec<(f64, f64, bool)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2] == "true")
        })
        .collect();
    for corner in [[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]] {
        let nearest = cells
            .iter()
            .min_by(|a, b| {
                let d = |c: &(f64, f64, bool)| (c.0 - corner[0]).hypot(c.1 - corner[1]);
                d(a).total_cmp(&d(b))
            })
            .unwrap();
        assert!(nearest.2, "corner {corner:?} outside the hull estimate");
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onewave"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let status = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(status(&["image", "--config", missing.to_str().unwrap()]), cli::EXIT_IO);
    assert_eq!(status(&["image", "--config", "preset:nope"]), cli::EXIT_CONFIG);
    assert_eq!(status(&["image", "--bogus"]), cli::EXIT_CONFIG);
    assert_eq!(status(&["reproduce", "ex9"]), cli::EXIT_CONFIG);

    // k R at the first zero of J_0: the classical pipeline refuses
    let k = 2.404_825_557_695_773 / 5.0;
    let text = PRESETS.iter().find(|(n, _)| *n == "empty").unwrap().1.replace("q = 1.0", &format!("q = {}", k * k));
    let cfg = dir.path().join("eig.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("eig");
    assert_eq!(
        status(&["image", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]),
        cli::EXIT_NUMERICAL
    );

    let out = dir.path().join("ok");
    assert_eq!(status(&["image", "--config", "preset:empty", "--out", out.to_str().unwrap()]), cli::EXIT_OK);
    assert!(out.join("manifest.csv").exists());
}

#[test]
fn flags_override_the_config() {
    let mut cfg = preset("ex2").unwrap();
    cfg.apply(&cli::Overrides {
        variant: Some(Variant::Classical),
        modes: Some(64),
        quadrature: Some(256),
        cutoff: Some(1e-6),
        log_scale: true,
    });
    assert_eq!(cfg.pipeline.variant, Variant::Classical);
    assert_eq!(cfg.data.modes, 64);
    assert_eq!(cfg.pipeline.resolution.boundary, 256);
    assert_eq!(cfg.pipeline.cutoff, 1e-6);
    assert!(cfg.pipeline.log_scale);
    cfg.validate().unwrap();
}

#[test]
fn sweep_expands_into_labelled_panels() {
    let cfg = preset("ex3").unwrap();
    let runs = cfg.expand();
    let ks: Vec<f64> = runs.iter().map(|(_, r)| r.scenario.wavenumber()).collect();
    assert_eq!(ks, vec![0.5, 1.0, 2.0, 4.0, 8.0]);
    let centers: Vec<[f64; 2]> = runs
        .iter()
        .map(|(_, r)| match &r.pipeline.polygon.as_ref().unwrap().families[0] {
            FamilySpec::Radial { center, .. } => *center,
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(centers, vec![[-1.5, 0.0], [-0.5, 0.0], [0.0, 0.0], [0.5, 0.0], [1.5, 0.0]]);
    assert!(runs.iter().all(|(l, r)| r.name.ends_with(l.as_str()) && r.sweep.is_empty()));
}

#[test]
fn data_with_a_sweep_is_ambiguous() {
    let cfg = preset("ex3").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut art = Artifacts::new(dir.path());
    let err = cmd_polygon(&cfg, Some(&fixture()), &mut art).unwrap_err();
    assert_eq!(err.exit_code(), cli::EXIT_CONFIG);
}
