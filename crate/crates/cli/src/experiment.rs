//! Orchestration: component registries, training runs, per-iteration curves,
//! comparative runs, edge reports and the counterexample demo.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use ndarray::{Array2, ArrayView2};
use rgboost::descent::{
    run_naive, run_repeated, run_residual, Ensemble, EnsembleForm, InnerRule, Offset, StepSchedule,
    TrainReport,
};
use rgboost::edge::{class_edge, EdgeEstimate};
use rgboost::learners::{
    BinaryStumps, ConstantLearner, EnumeratedClass, MulticlassStumps, RegressionStumps,
    RestrictionSet,
};
use rgboost::objectives::{
    regularize, BinaryHinge, ExponentialLoss, LabeledData, Labels, MulticlassHinge, Objective,
    PairwiseRankingHinge, SquaredLoss, TwoPointAbs,
};
use rgboost::{combine, FnVec, SampleSpace};

use crate::config::ExperimentConfig;
use crate::dataset::{Dataset, TaskKind};
use crate::metrics::eval_metric;

pub fn task_for_objective(name: &str) -> Result<TaskKind> {
    Ok(match name {
        "squared" => TaskKind::Regression,
        "hinge" | "exponential" => TaskKind::Binary,
        "multiclass_hinge" => TaskKind::Multiclass,
        "ranking_hinge" => TaskKind::Ranking,
        other => bail!("unknown objective {other:?}"),
    })
}

pub fn build_objective(
    name: &str,
    lambda: Option<f64>,
    space: &Arc<SampleSpace>,
    labels: &LabeledData,
) -> Result<Arc<dyn Objective>> {
    let base: Arc<dyn Objective> = match (name, &labels.labels) {
        ("squared", Labels::Real(targets)) => {
            Arc::new(SquaredLoss::new(space, targets.clone()).map_err(|e| anyhow!("{e}"))?)
        }
        ("hinge", Labels::Binary(y)) => {
            Arc::new(BinaryHinge::new(space, y.clone()).map_err(|e| anyhow!("{e}"))?)
        }
        ("exponential", Labels::Binary(y)) => {
            Arc::new(ExponentialLoss::new(space, y.clone()).map_err(|e| anyhow!("{e}"))?)
        }
        ("multiclass_hinge", Labels::Class { classes, .. }) => {
            Arc::new(MulticlassHinge::new(space, classes.clone()).map_err(|e| anyhow!("{e}"))?)
        }
        ("ranking_hinge", Labels::Real(relevance)) => {
            let groups = labels
                .groups
                .as_ref()
                .ok_or_else(|| anyhow!("ranking objective needs query groups"))?;
            Arc::new(
                PairwiseRankingHinge::new(space, &relevance.column(0).to_vec(), groups)
                    .map_err(|e| anyhow!("{e}"))?,
            )
        }
        (name, _) => bail!("objective {name:?} does not match the label type"),
    };
    match lambda {
        None => Ok(base),
        Some(lam) => Ok(Arc::new(regularize(base, lam).map_err(|e| anyhow!("{e}"))?)),
    }
}

pub fn build_learner(name: &str, output_dim: usize) -> Result<Box<dyn RestrictionSet>> {
    match name {
        "regression_stumps" => Ok(Box::new(RegressionStumps)),
        "binary_stumps" => {
            if output_dim != 1 {
                bail!("binary stumps need a single-output task");
            }
            Ok(Box::new(BinaryStumps))
        }
        "multiclass_stumps" => {
            if output_dim < 2 {
                bail!("multiclass stumps need at least 2 outputs");
            }
            Ok(Box::new(MulticlassStumps))
        }
        "constant" => Ok(Box::new(ConstantLearner)),
        other => bail!("unknown learner {other:?}"),
    }
}

pub fn build_schedule(cfg: &ExperimentConfig, objective: &dyn Objective) -> Result<StepSchedule> {
    let sched = &cfg.schedule;
    Ok(match sched.name.as_str() {
        "fixed" => {
            let eta = sched
                .eta
                .ok_or_else(|| anyhow!("fixed schedule needs an eta"))?;
            StepSchedule::Fixed(eta)
        }
        "inv_lambda_t" => {
            let lambda = objective.strong_convexity();
            if lambda <= 0.0 {
                bail!(
                    "schedule inv_lambda_t needs a strongly convex objective; \
                     add an L2 regularizer (objective.lambda)"
                );
            }
            StepSchedule::InvLambdaT {
                c: sched.c.unwrap_or(1.0),
                lambda,
            }
        }
        "inv_sqrt_t" => StepSchedule::InvSqrtT,
        "line_search" => StepSchedule::LineSearch {
            shrink: sched.shrink.unwrap_or(0.5),
            max_evals: sched.max_evals.unwrap_or(30),
        },
        other => bail!("unknown schedule {other:?}"),
    })
}

pub fn run_algorithm(
    algorithm: &str,
    cfg: &ExperimentConfig,
    objective: &dyn Objective,
    learner: &dyn RestrictionSet,
    schedule: &StepSchedule,
) -> Result<(Ensemble, TrainReport)> {
    let t = cfg.iterations;
    let run = match algorithm {
        "naive" => run_naive(objective, learner, schedule, t, None),
        "repeated" => run_repeated(
            objective,
            learner,
            schedule,
            t,
            None,
            &InnerRule::FixedPerIteration,
        ),
        "repeated-threshold" => run_repeated(
            objective,
            learner,
            schedule,
            t,
            None,
            &InnerRule::Threshold {
                eps: cfg.threshold_eps,
                max_fits: cfg.threshold_max_fits,
            },
        ),
        "residual" => run_residual(objective, learner, schedule, t, None),
        other => bail!("unknown algorithm {other:?}"),
    };
    run.map_err(|e| anyhow!("training failed: {e}"))
}

/// One curve line: training state after iteration `t`. Test columns are
/// absent when the test split is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub t: usize,
    pub weak_learners: usize,
    pub train_objective: f64,
    pub test_objective: Option<f64>,
    pub train_metric: f64,
    pub test_metric: Option<f64>,
    pub edge: f64,
    pub step: f64,
}

pub fn write_curve_csv<W: Write>(rows: &[CurveRow], out: &mut W) -> std::io::Result<()> {
    writeln!(
        out,
        "t,weak_learners,train_objective,test_objective,train_metric,test_metric,edge,step"
    )?;
    for r in rows {
        let blank = String::new;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.weak_learners,
            r.train_objective,
            r.test_objective
                .map(|v| v.to_string())
                .unwrap_or_else(blank),
            r.train_metric,
            r.test_metric.map(|v| v.to_string()).unwrap_or_else(blank),
            r.edge,
            r.step
        )?;
    }
    Ok(())
}

pub struct TrainedRun {
    pub ensemble: Ensemble,
    pub report: TrainReport,
    pub curve: Vec<CurveRow>,
}

/// Trains per the configuration and evaluates train and test objective and
/// task metric after every iteration. The train objective column carries the
/// report's values verbatim. If per-iteration evaluation fails partway, the
/// rows computed so far are flushed to the configured curve path before the
/// error is returned.
pub fn run_training(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<TrainedRun> {
    cfg.validate()?;
    let (train_space, train_labels) = dataset.subspace(&dataset.train)?;
    let objective = build_objective(
        &cfg.objective.name,
        cfg.objective.lambda,
        &train_space,
        &train_labels,
    )?;
    let learner = build_learner(&cfg.learner, train_space.output_dim())?;
    let schedule = build_schedule(cfg, objective.as_ref())?;

    let (ensemble, report) = run_algorithm(
        &cfg.algorithm,
        cfg,
        objective.as_ref(),
        learner.as_ref(),
        &schedule,
    )?;

    let test_side = if dataset.test.is_empty() {
        None
    } else {
        let (test_space, test_labels) = dataset.subspace(&dataset.test)?;
        let test_objective = build_objective(
            &cfg.objective.name,
            cfg.objective.lambda,
            &test_space,
            &test_labels,
        )?;
        Some((test_space, test_labels, test_objective))
    };

    let (curve, failure) = build_curve(
        &ensemble,
        &report,
        &train_labels,
        dataset.task,
        test_side.as_ref().map(|(s, l, o)| (s, l, o.as_ref())),
    );
    if let Some(error) = failure {
        if let Some(path) = &cfg.out_curve {
            let mut buffer = Vec::new();
            write_curve_csv(&curve, &mut buffer)?;
            fs::write(path, buffer)
                .with_context(|| format!("flushing partial curve to {}", path.display()))?;
        }
        return Err(error.context("per-iteration evaluation failed; partial curve flushed"));
    }
    Ok(TrainedRun {
        ensemble,
        report,
        curve,
    })
}

/// Curve rows for every evaluated iteration plus the error that stopped the
/// evaluation, when one did.
fn build_curve(
    ensemble: &Ensemble,
    report: &TrainReport,
    train_labels: &LabeledData,
    task: TaskKind,
    test_side: Option<(&Arc<SampleSpace>, &LabeledData, &dyn Objective)>,
) -> (Vec<CurveRow>, Option<anyhow::Error>) {
    let train_space = ensemble.current().space();
    let mut f_train = match ensemble.offset() {
        Offset::Constant(c) => match FnVec::constant(train_space, c.view()) {
            Ok(f) => f,
            Err(e) => return (Vec::new(), Some(anyhow!("{e}"))),
        },
        Offset::Fixed(start) => start.clone(),
    };
    let mut f_test: Option<Array2<f64>> = match &test_side {
        Some((space, ..)) => {
            let mut out = Array2::zeros((space.len(), space.output_dim()));
            if let Offset::Constant(c) = ensemble.offset() {
                for mut row in out.rows_mut() {
                    row.assign(c);
                }
            }
            Some(out)
        }
        None => None,
    };

    let mut rows = Vec::with_capacity(report.records.len());
    let mut used = 0;
    for record in &report.records {
        let evaluated = (|| -> Result<CurveRow> {
            while used < record.weak_learners {
                let (coeff, hypothesis) = &ensemble.terms()[used];
                f_train = combine(1.0, &f_train, -*coeff, hypothesis.values())
                    .map_err(|e| anyhow!("{e}"))?;
                if let (Some(values), Some((space, ..))) = (&mut f_test, &test_side) {
                    for (i, mut row) in values.rows_mut().into_iter().enumerate() {
                        let eval = hypothesis
                            .evaluate(space.feature_row(i))
                            .map_err(|e| anyhow!("test-side evaluation: {e}"))?;
                        row.scaled_add(-*coeff, &eval);
                    }
                }
                used += 1;
            }
            let train_metric = eval_metric(f_train.values(), train_labels, task)?;
            let (test_objective, test_metric) = match (&f_test, &test_side) {
                (Some(values), Some((space, labels, objective))) => {
                    let f = FnVec::new(space, values.clone()).map_err(|e| anyhow!("{e}"))?;
                    let objective_value = objective.value(&f).map_err(|e| anyhow!("{e}"))?;
                    let metric = eval_metric(values.view(), labels, task)?;
                    (Some(objective_value), Some(metric))
                }
                _ => (None, None),
            };
            Ok(CurveRow {
                t: record.t,
                weak_learners: record.weak_learners,
                train_objective: record.objective,
                test_objective,
                train_metric,
                test_metric,
                edge: record.edge,
                step: record.step,
            })
        })();
        match evaluated {
            Ok(row) => rows.push(row),
            Err(error) => return (rows, Some(error)),
        }
    }
    (rows, None)
}

pub fn write_outputs(cfg: &ExperimentConfig, run: &TrainedRun) -> Result<()> {
    if let Some(path) = &cfg.out_curve {
        let mut buffer = Vec::new();
        write_curve_csv(&run.curve, &mut buffer)?;
        fs::write(path, buffer).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &cfg.out_model {
        save_model(path, &run.ensemble)?;
    }
    Ok(())
}

pub fn save_model(path: &Path, ensemble: &Ensemble) -> Result<()> {
    let json = ensemble.to_json().map_err(|e| anyhow!("{e}"))?;
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<EnsembleForm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    EnsembleForm::from_json(&text).map_err(|e| anyhow!("loading {}: {e}", path.display()))
}

pub fn predict_all(model: &EnsembleForm, features: ArrayView2<f64>) -> Result<Array2<f64>> {
    model.predict_matrix(features).map_err(|e| anyhow!("{e}"))
}

/// Appends a label to a path's file stem: `curves.csv` -> `curves.naive.csv`.
pub fn suffixed_path(path: &Path, label: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.{label}.{ext}"))
}

/// Runs the three algorithms on the same data and split, writing one curve
/// file per algorithm. Returns (algorithm, final train objective) pairs.
pub fn compare(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<(String, f64)>> {
    let mut summary = Vec::new();
    for algorithm in ["naive", "repeated", "residual"] {
        let mut sub = cfg.clone();
        sub.algorithm = algorithm.into();
        sub.out_curve = cfg.out_curve.as_ref().map(|p| suffixed_path(p, algorithm));
        sub.out_model = cfg.out_model.as_ref().map(|p| suffixed_path(p, algorithm));
        let run = run_training(&sub, dataset)?;
        write_outputs(&sub, &run)?;
        let final_objective = run
            .curve
            .last()
            .map(|r| r.train_objective)
            .unwrap_or(run.report.initial_objective);
        summary.push((algorithm.to_string(), final_objective));
    }
    Ok(summary)
}

/// Certifies the learner's edge over the subgradient targets encountered in
/// a configured run on the full dataset.
pub fn edge_report(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<EdgeEstimate> {
    cfg.validate()?;
    let all: Vec<usize> = (0..dataset.space.len()).collect();
    let (space, labels) = dataset.subspace(&all)?;
    let objective = build_objective(&cfg.objective.name, cfg.objective.lambda, &space, &labels)?;
    let learner = build_learner(&cfg.learner, space.output_dim())?;
    let schedule = build_schedule(cfg, objective.as_ref())?;
    let (_, report) = run_algorithm(
        &cfg.algorithm,
        cfg,
        objective.as_ref(),
        learner.as_ref(),
        &schedule,
    )?;
    let targets: Vec<FnVec> = report.projection_targets().cloned().collect();
    if targets.is_empty() {
        bail!("run produced no projection targets; nothing to certify");
    }
    class_edge(learner.as_ref(), &targets).map_err(|e| anyhow!("{e}"))
}

pub struct DemoOutcome {
    pub algorithm: String,
    pub final_objective: f64,
    pub initial_objective: f64,
    pub final_values: (f64, f64),
    pub csv_path: PathBuf,
}

/// The two-point non-smooth objective demo: all three algorithms on the
/// sign-valued single-point hypothesis class, starting from f = (0.5, 1.0).
pub fn demo_counterexample(iterations: usize, out_dir: &Path) -> Result<Vec<DemoOutcome>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let features = Array2::from_shape_vec((2, 1), vec![0.0, 1.0])?;
    let space = SampleSpace::uniform(features, 1).map_err(|e| anyhow!("{e}"))?;
    let objective = TwoPointAbs::new(&space).map_err(|e| anyhow!("{e}"))?;
    let members = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
        .iter()
        .map(|vals| {
            FnVec::new(
                &space,
                Array2::from_shape_vec((2, 1), vals.to_vec()).unwrap(),
            )
            .unwrap()
        })
        .collect();
    let class = EnumeratedClass::from_fnvecs(members).map_err(|e| anyhow!("{e}"))?;
    let f0 = FnVec::new(&space, Array2::from_shape_vec((2, 1), vec![0.5, 1.0])?)
        .map_err(|e| anyhow!("{e}"))?;
    let schedule = StepSchedule::InvSqrtT;

    let mut outcomes = Vec::new();
    for algorithm in ["naive", "repeated", "residual"] {
        let (ensemble, report) = match algorithm {
            "naive" => run_naive(&objective, &class, &schedule, iterations, Some(f0.clone())),
            "repeated" => run_repeated(
                &objective,
                &class,
                &schedule,
                iterations,
                Some(f0.clone()),
                &InnerRule::FixedPerIteration,
            ),
            _ => run_residual(&objective, &class, &schedule, iterations, Some(f0.clone())),
        }
        .map_err(|e| anyhow!("{e}"))?;
        let csv_path = out_dir.join(format!("counterexample_{algorithm}.csv"));
        let mut buffer = Vec::new();
        report.write_csv(&mut buffer)?;
        fs::write(&csv_path, buffer).with_context(|| format!("writing {}", csv_path.display()))?;
        let values = ensemble.current().values();
        outcomes.push(DemoOutcome {
            algorithm: algorithm.into(),
            final_objective: objective
                .value(ensemble.current())
                .map_err(|e| anyhow!("{e}"))?,
            initial_objective: report.initial_objective,
            final_values: (values[[0, 0]], values[[1, 0]]),
            csv_path,
        });
    }
    Ok(outcomes)
}
