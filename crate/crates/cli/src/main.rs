use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use rgboost_cli::config::{ExperimentConfig, ObjectiveConfig};
use rgboost_cli::dataset::{load_dataset, DataFormat, Dataset, TaskKind};
use rgboost_cli::experiment::{
    compare, demo_counterexample, edge_report, load_model, predict_all, run_training,
    task_for_objective, write_outputs,
};
use rgboost_cli::metrics::eval_metric;

#[derive(Parser)]
#[command(
    name = "rgboost",
    about = "Functional gradient boosting by restricted gradient descent",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and emit its convergence curve and model file.
    Train(RunArgs),
    /// Run the single-projection, repeated and residual algorithms on the
    /// same data and split; emit one curve per algorithm.
    Compare(RunArgs),
    /// Certify the learner's edge over the gradients of a configured run.
    Edge(EdgeArgs),
    /// Two-point non-smooth objective demo separating the three algorithms.
    DemoCounterexample(DemoArgs),
    /// Score a saved model on a dataset.
    Eval(EvalArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// csv | libsvm | ranking (inferred from the extension when omitted).
    #[arg(long)]
    format: Option<String>,
    /// squared | hinge | exponential | multiclass_hinge | ranking_hinge
    #[arg(long)]
    objective: Option<String>,
    /// L2 regularization strength added to the objective.
    #[arg(long)]
    lambda: Option<f64>,
    /// regression_stumps | binary_stumps | multiclass_stumps | constant
    #[arg(long)]
    learner: Option<String>,
    /// naive | repeated | repeated-threshold | residual
    #[arg(long)]
    algorithm: Option<String>,
    /// fixed | inv_lambda_t | inv_sqrt_t | line_search
    #[arg(long)]
    schedule: Option<String>,
    /// Step size for the fixed schedule.
    #[arg(long)]
    eta: Option<f64>,
    /// Numerator constant for the inv_lambda_t schedule.
    #[arg(long)]
    schedule_c: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    /// Inner-loop accuracy for the repeated-threshold algorithm.
    #[arg(long)]
    threshold_eps: Option<f64>,
    #[arg(long)]
    threshold_max_fits: Option<usize>,
    /// Standardize features to zero mean and unit variance before training.
    #[arg(long)]
    standardize: bool,
    #[arg(long)]
    out_curve: Option<PathBuf>,
    #[arg(long)]
    out_model: Option<PathBuf>,
}

#[derive(Args)]
struct EdgeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Write the edge report JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value = "counterexample-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    format: Option<String>,
    /// multiclass | ranking | regression | binary
    #[arg(long)]
    task: String,
}

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = &self.data {
            cfg.data = Some(v.clone());
        }
        if let Some(v) = &self.format {
            cfg.format = Some(v.clone());
        }
        if let Some(v) = &self.objective {
            cfg.objective = ObjectiveConfig {
                name: v.clone(),
                lambda: cfg.objective.lambda,
            };
        }
        if let Some(v) = self.lambda {
            cfg.objective.lambda = Some(v);
        }
        if let Some(v) = &self.learner {
            cfg.learner = v.clone();
        }
        if let Some(v) = &self.algorithm {
            cfg.algorithm = v.clone();
        }
        if let Some(v) = &self.schedule {
            cfg.schedule.name = v.clone();
        }
        if let Some(v) = self.eta {
            cfg.schedule.eta = Some(v);
        }
        if let Some(v) = self.schedule_c {
            cfg.schedule.c = Some(v);
        }
        if let Some(v) = self.iters {
            cfg.iterations = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.test_fraction {
            cfg.test_fraction = v;
        }
        if let Some(v) = self.threshold_eps {
            cfg.threshold_eps = v;
        }
        if let Some(v) = self.threshold_max_fits {
            cfg.threshold_max_fits = v;
        }
        if self.standardize {
            cfg.standardize = true;
        }
        if let Some(v) = &self.out_curve {
            cfg.out_curve = Some(v.clone());
        }
        if let Some(v) = &self.out_model {
            cfg.out_model = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_configured_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let Some(path) = &cfg.data else {
        bail!("no dataset given; pass --data or set it in the config");
    };
    let format = match &cfg.format {
        Some(name) => DataFormat::parse(name)?,
        None => DataFormat::infer(path)?,
    };
    let raw = load_dataset(path, format)?;
    let task = task_for_objective(&cfg.objective.name)?;
    Dataset::build(raw, task, cfg.test_fraction, cfg.seed, cfg.standardize)
}

fn parse_task(name: &str) -> Result<TaskKind> {
    Ok(match name {
        "multiclass" => TaskKind::Multiclass,
        "ranking" => TaskKind::Ranking,
        "regression" => TaskKind::Regression,
        "binary" => TaskKind::Binary,
        other => bail!("unknown task {other:?}"),
    })
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Train(args) => {
            let cfg = args.resolve()?;
            let dataset = load_configured_dataset(&cfg)?;
            let run = run_training(&cfg, &dataset)?;
            write_outputs(&cfg, &run)?;
            let last = run.curve.last();
            println!(
                "trained {} x {} ({} weak learners): final train objective {}",
                cfg.algorithm,
                cfg.iterations,
                run.ensemble.num_terms(),
                last.map(|r| r.train_objective.to_string())
                    .unwrap_or_else(|| "-".into()),
            );
            if let Some(row) = last {
                if let (Some(objective), Some(metric)) = (row.test_objective, row.test_metric) {
                    println!("test objective {objective}  test metric {metric}");
                }
            }
            Ok(())
        }
        Command::Compare(args) => {
            let cfg = args.resolve()?;
            let dataset = load_configured_dataset(&cfg)?;
            let summary = compare(&cfg, &dataset)?;
            for (algorithm, objective) in summary {
                println!("{algorithm}: final train objective {objective}");
            }
            Ok(())
        }
        Command::Edge(args) => {
            let cfg = args.run.resolve()?;
            let dataset = load_configured_dataset(&cfg)?;
            let estimate = edge_report(&cfg, &dataset)?;
            let json = estimate.to_json();
            match &args.out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::DemoCounterexample(args) => {
            for outcome in demo_counterexample(args.iters, &args.out_dir)? {
                println!(
                    "{:>8}: objective {:.6} -> {:.6}  f = ({:.6}, {:.6})  curve {}",
                    outcome.algorithm,
                    outcome.initial_objective,
                    outcome.final_objective,
                    outcome.final_values.0,
                    outcome.final_values.1,
                    outcome.csv_path.display()
                );
            }
            Ok(())
        }
        Command::Eval(args) => {
            let model = load_model(&args.model)?;
            let format = match &args.format {
                Some(name) => DataFormat::parse(name)?,
                None => DataFormat::infer(&args.data)?,
            };
            let raw = load_dataset(&args.data, format)?;
            let task = parse_task(&args.task)?;
            let dataset = Dataset::build(raw, task, 0.0, 0, false)?;
            let predictions = predict_all(&model, dataset.space.features())?;
            let metric = eval_metric(predictions.view(), &dataset.labels, task)?;
            println!(
                "{}",
                serde_json::json!({
                    "task": args.task,
                    "n": dataset.space.len(),
                    "metric": metric,
                })
            );
            Ok(())
        }
    }
}
