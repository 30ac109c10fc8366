use std::path::{Path, PathBuf};

use fsi_relax::config::SimulationConfig;
use fsi_relax::experiments;
use fsi_relax::output::{read_fluid_csv, read_solid_csv, write_snapshot_csv};
use proptest::prelude::*;

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn small_bubble() -> SimulationConfig {
    let mut cfg = SimulationConfig::bubble().with_cells(60);
    cfg.time.t_end = 2e-5;
    cfg.time.output_times = vec![0.0, 1e-5, 2e-5];
    cfg
}

#[test]
fn snapshots_survive_csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for s in experiments::run(&small_bubble()).unwrap() {
        let (solid, fluid) = write_snapshot_csv(&s, dir.path()).unwrap();
        assert_eq!(read_solid_csv(&solid).unwrap(), s.solid);
        assert_eq!(read_fluid_csv(&fluid).unwrap(), s.fluid);
    }
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(
        names,
        ["fluid_t0.csv", "fluid_t10.csv", "fluid_t20.csv", "solid_t0.csv", "solid_t10.csv", "solid_t20.csv"]
    );
}

#[test]
fn bubble_snapshot_has_one_row_per_cell() {
    let mut cfg = SimulationConfig::bubble();
    cfg.time.t_end = 0.0;
    cfg.time.output_times = vec![0.0];
    let s = &experiments::run(&cfg).unwrap()[0];
    assert_eq!(s.fluid.len(), 600);
    assert_eq!(s.solid.len(), 600);
}

#[test]
fn no_output_times_no_snapshots() {
    let mut cfg = small_bubble();
    cfg.time.output_times.clear();
    assert!(experiments::run(&cfg).unwrap().is_empty());
}

#[test]
fn identical_configs_give_identical_runs() {
    let a = experiments::run(&small_bubble()).unwrap();
    let b = experiments::run(&small_bubble()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn snapshots_do_not_perturb_the_run() {
    let mut only_end = small_bubble();
    only_end.time.output_times = vec![2e-5];
    let last = experiments::run(&only_end).unwrap().pop().unwrap();
    assert_eq!(experiments::run(&small_bubble()).unwrap().pop().unwrap(), last);
}

#[test]
fn shipped_configs_load_and_round_trip() {
    for name in ["bubble.cfg", "bubble_1ms.cfg", "gridstudy.cfg"] {
        let cfg = SimulationConfig::load(&shipped(name)).unwrap();
        assert_eq!(SimulationConfig::parse(&cfg.serialize().unwrap()).unwrap(), cfg, "{name}");
    }
    let fig4 = SimulationConfig::load(&shipped("bubble.cfg")).unwrap();
    assert_eq!(fig4.time.output_times.len(), 7);
    assert_eq!(fig4.grid.n_fluid, 600);
    assert_eq!(SimulationConfig::load(&shipped("gridstudy.cfg")).unwrap().study.cells, [200, 400, 800, 1600]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trip(cfl in 0.05f64..1.0, n in 1usize..5000, t_end in 1e-7f64..1e-2, frac in 0.0f64..1.0) {
        let mut cfg = SimulationConfig::bubble().with_cells(n);
        cfg.time.cfl = cfl;
        cfg.time.t_end = t_end;
        cfg.time.output_times = vec![0.0, frac * t_end, t_end];
        let text = cfg.serialize().unwrap();
        prop_assert_eq!(SimulationConfig::parse(&text).unwrap(), cfg);
    }
}
