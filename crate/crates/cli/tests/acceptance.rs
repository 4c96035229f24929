//! Experiment-level acceptance: the comparative multiclass run and the
//! deterministic emission of its curve files.

#![allow(clippy::field_reassign_with_default)]

mod common;

use std::time::Instant;

use rgboost_cli::config::ExperimentConfig;
use rgboost_cli::dataset::{load_dataset, DataFormat, Dataset, TaskKind};
use rgboost_cli::experiment::compare;

#[test]
fn criterion_10_comparative_curves() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let data_path = dir.path().join("blobs.csv");
    common::write_blobs_csv(&data_path, 40, 0.8, 300_010);

    let mut cfg = ExperimentConfig::default();
    cfg.objective.name = "multiclass_hinge".into();
    cfg.learner = "multiclass_stumps".into();
    cfg.schedule.name = "inv_sqrt_t".into();
    cfg.iterations = 300;
    cfg.seed = 11;
    cfg.test_fraction = 0.2;

    let raw = load_dataset(&data_path, DataFormat::Csv).unwrap();
    let dataset = Dataset::build(
        raw,
        TaskKind::Multiclass,
        cfg.test_fraction,
        cfg.seed,
        false,
    )
    .unwrap();

    let run_once = |out_dir: &std::path::Path| {
        let mut sub = cfg.clone();
        sub.out_curve = Some(out_dir.join("curves.csv"));
        let summary = compare(&sub, &dataset).unwrap();
        let read = |name: &str| std::fs::read(out_dir.join(name)).unwrap();
        (
            summary,
            read("curves.naive.csv"),
            read("curves.repeated.csv"),
            read("curves.residual.csv"),
        )
    };

    let first_dir = dir.path().join("a");
    let second_dir = dir.path().join("b");
    std::fs::create_dir_all(&first_dir).unwrap();
    std::fs::create_dir_all(&second_dir).unwrap();
    let (summary, naive_a, repeated_a, residual_a) = run_once(&first_dir);
    let (summary_b, naive_b, repeated_b, residual_b) = run_once(&second_dir);

    // byte-identical curve files across runs
    assert_eq!(naive_a, naive_b);
    assert_eq!(repeated_a, repeated_b);
    assert_eq!(residual_a, residual_b);
    assert_eq!(summary, summary_b);

    let objective_of = |name: &str| {
        summary
            .iter()
            .find(|(algorithm, _)| algorithm == name)
            .map(|(_, value)| *value)
            .unwrap()
    };
    let naive = objective_of("naive");
    let repeated = objective_of("repeated");
    let residual = objective_of("residual");
    assert!(
        repeated <= naive,
        "repeated {repeated} should not exceed naive {naive}"
    );
    assert!(
        residual <= naive,
        "residual {residual} should not exceed naive {naive}"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 10 comparative curves (naive {naive:.4}, repeated {repeated:.4}, residual \
         {residual:.4}, deterministic files): PASS ({elapsed:?})"
    );
}
