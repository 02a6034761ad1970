mod common;

use pubcareers::validation::SynthSpec;

fn check(seed: u64, scale: f64) {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SynthSpec::default().scaled(scale);
    spec.seed = seed;
    let (_, cfg) = common::run_synthetic(&spec, dir.path(), 2);
    let oracle = common::oracle_for_run(&dir.path().join("run"), &cfg);
    let cmp = common::compare_with_run(&dir.path().join("run"), &oracle);
    assert!(cmp.cells > 500, "only {} cells compared", cmp.cells);
    assert!(
        cmp.mismatches.is_empty(),
        "{} mismatches, first: {:#?}",
        cmp.mismatches.len(),
        &cmp.mismatches[..cmp.mismatches.len().min(10)]
    );
}

#[test]
fn small_corpora_match_brute_force() {
    for seed in [1, 2, 3] {
        check(seed, 0.08);
    }
}

#[test]
fn demo_fixture_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = pubcareers::AnalysisConfig::load(
        &std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo/config.toml"),
    )
    .unwrap();
    pubcareers::pipeline::run(pubcareers::pipeline::Stage::All, &cfg, dir.path()).unwrap();
    let oracle = common::oracle_for_run(dir.path(), &cfg);
    let cmp = common::compare_with_run(dir.path(), &oracle);
    assert!(cmp.cells > 20);
    assert!(cmp.mismatches.is_empty(), "{:#?}", cmp.mismatches);
}

#[test]
fn a_perturbed_cell_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = SynthSpec::default().scaled(0.05);
    spec.seed = 11;
    let (_, cfg) = common::run_synthetic(&spec, dir.path(), 1);
    let run = dir.path().join("run");
    let oracle = common::oracle_for_run(&run, &cfg);
    let path = run.join("fig06.csv");
    let mut rows = pubcareers::stats::read_rows(&path).unwrap();
    rows[3].value += 1e-6;
    pubcareers::stats::write_rows(&rows, &path).unwrap();
    let cmp = common::compare_with_run(&run, &oracle);
    assert_eq!(cmp.mismatches.len(), 1, "{:?}", cmp.mismatches);
}
