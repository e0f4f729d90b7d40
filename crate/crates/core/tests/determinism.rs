//! Golden-file checks. Set `UPDATE_GOLDEN=1` to rewrite the files under
//! `tests/golden/` after an intentional output change.

use std::fs;
use std::path::{Path, PathBuf};

use growthlab::experiments::{run_experiment, ExperimentKind, RunConfig};
use growthlab::EvolutionConfig;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn converge_config() -> RunConfig {
    let mut cfg = RunConfig::default_for(ExperimentKind::Switch);
    cfg.seed = 20_240_601;
    cfg
}

fn evolve_config() -> RunConfig {
    let mut cfg = RunConfig::default_for(ExperimentKind::Evolve);
    cfg.seed = 77;
    cfg.steps = 100;
    cfg.evolution = Some(EvolutionConfig {
        population_size: 10,
        imitation_probability: 0.1,
        observation_sample: 3,
        ..EvolutionConfig::default()
    });
    cfg
}

fn run_into(dir: &Path, mut cfg: RunConfig) -> Vec<u8> {
    let out = dir.join("out.csv");
    cfg.output_path = out.to_string_lossy().into_owned();
    run_experiment(&cfg).unwrap();
    fs::read(out).unwrap()
}

fn check_golden(name: &str, cfg: RunConfig) {
    let first = run_into(tempfile::tempdir().unwrap().path(), cfg.clone());
    let second = run_into(tempfile::tempdir().unwrap().path(), cfg);
    assert!(first == second, "{name}: repeated runs differ");

    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        fs::write(&path, &first).unwrap();
        return;
    }
    let golden = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(first == golden, "{name} differs from {}", path.display());
}

#[test]
fn converge_matches_golden() {
    check_golden("converge.csv", converge_config());
}

#[test]
fn evolve_matches_golden() {
    check_golden("evolve.csv", evolve_config());
}

#[test]
fn golden_shapes() {
    let converge = fs::read_to_string(golden_dir().join("converge.csv")).unwrap();
    let mut lines = converge.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,agent_id,income,growth,equilibrium_growth,excess_growth,sigma_0,sigma_1,sigma_2,sigma_3"
    );
    assert_eq!(lines.count(), 500);

    let evolve = fs::read_to_string(golden_dir().join("evolve.csv")).unwrap();
    let mut lines = evolve.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,agent_id,income,growth,equilibrium_growth,sigma_0,sigma_1,sigma_2,sigma_3"
    );
    assert_eq!(lines.count(), 10 * 100);
}

#[test]
fn svg_output_is_byte_stable() {
    let mut cfg = converge_config();
    cfg.steps = 120;
    cfg.emit_svg = true;
    let read_svg = |dir: &Path| {
        let mut cfg = cfg.clone();
        cfg.output_path = dir.join("fig.csv").to_string_lossy().into_owned();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.files.len(), 6);
        (
            fs::read(dir.join("fig_growth.svg")).unwrap(),
            fs::read(dir.join("fig_excess.svg")).unwrap(),
        )
    };
    let a = read_svg(tempfile::tempdir().unwrap().path());
    let b = read_svg(tempfile::tempdir().unwrap().path());
    assert!(a == b);
    assert!(a.0.starts_with(b"<svg") || a.0.starts_with(b"<?xml"));
}

#[test]
fn effective_config_is_written_and_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = evolve_config();
    cfg.output_path = dir.path().join("pop.csv").to_string_lossy().into_owned();
    run_experiment(&cfg).unwrap();
    let eff = growthlab::experiments::load_config(dir.path().join("pop.config.json")).unwrap();
    assert_eq!(eff.evolution.as_ref().unwrap().seed, 77);
    assert!(eff.economy.scaling.is_some());

    let first = fs::read(dir.path().join("pop.csv")).unwrap();
    let again = tempfile::tempdir().unwrap();
    let mut eff = eff;
    eff.output_path = again.path().join("pop.csv").to_string_lossy().into_owned();
    run_experiment(&eff).unwrap();
    assert!(first == fs::read(again.path().join("pop.csv")).unwrap());
}
