//! `xkan`: dataset generation, training, evaluation, benchmarking,
//! statistical comparison and plot-data export.

mod settings;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use xkan_core::bench::{
    compare_reports, plot_grid, run_benchmark, write_plot_csv, BenchmarkReport, Method, ModelDocument,
    Problem,
};
use xkan_core::data::{mae, read_csv_raw, sample_raw, RawData, Scaler, TestFunction};
use xkan_core::mix_seed;

use settings::{resolve, FileConfig, Overrides, SEED_ENV};

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation, unreadable input or schema mismatch (exit 2).
    Usage(String),
    /// Failure while running a valid request (exit 1).
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<xkan_core::Error> for CliError {
    fn from(e: xkan_core::Error) -> Self {
        use xkan_core::Error as E;
        match e {
            E::Config(_) | E::Parse { .. } | E::Json(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "xkan", version, about = "Rule-based regression with local KAN models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic function and write raw values as CSV.
    Generate(GenerateArgs),
    /// Train one model and write it as JSON.
    Train(TrainArgs),
    /// Mean absolute error of a saved model on a CSV file.
    Eval(EvalArgs),
    /// Run Monte Carlo cross-validation for problems × methods.
    Benchmark(BenchmarkArgs),
    /// Friedman ranks and Wilcoxon/Holm tests across benchmark reports.
    Compare(CompareArgs),
    /// Write a prediction grid of a 1- or 2-input model.
    ExportPlot(ExportPlotArgs),
}

fn parse_function(s: &str) -> Result<TestFunction, String> {
    s.parse().map_err(|e: xkan_core::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: xkan_core::Error| e.to_string())
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_function)]
    function: TestFunction,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Master seed (default: $XKAN_SEED or 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Options shared by commands that configure an experiment.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat JSON config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (default: config file, then $XKAN_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_frac: Option<f64>,
    /// Sample count for synthetic functions.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// CSV dataset (header row, target in the last column).
    #[arg(long, conflicts_with = "function", required_unless_present = "function")]
    data: Option<PathBuf>,
    #[arg(long, value_parser = parse_function)]
    function: Option<TestFunction>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Model JSON to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the metrics JSON here (always printed to stdout).
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Synthetic functions, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_function)]
    function: Vec<TestFunction>,
    /// CSV datasets (repeatable).
    #[arg(long)]
    data: Vec<PathBuf>,
    /// Methods, comma separated (default: config file, then xkan).
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    method: Vec<Method>,
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Parallel trials (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Report JSON to write.
    #[arg(long)]
    out: PathBuf,
    /// Optional flat per-trial CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Benchmark report JSON files.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Method the others are tested against.
    #[arg(long, default_value = "xkan", value_parser = parse_method)]
    reference: Method,
    /// Also write the comparison as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportPlotArgs {
    #[arg(long)]
    model: PathBuf,
    /// Grid points per axis.
    #[arg(long, default_value_t = 100)]
    resolution: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("no such file: {}", path.display())))
    }
}

fn env_seed() -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?,
    };
    // same stream as the benchmark's synthetic dataset
    let raw = sample_raw(args.function, args.samples, mix_seed(seed, 0))?;
    match &args.out {
        Some(path) => raw.write_csv(path)?,
        None => raw.write_csv_to(std::io::stdout().lock())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainMetrics {
    method: Method,
    problem: String,
    seed: u64,
    train_rows: usize,
    test_rows: Option<usize>,
    train_mae: f64,
    test_mae: Option<f64>,
    rules: Option<usize>,
    uncompacted_rules: Option<usize>,
}

fn train(args: TrainArgs) -> CliResult<()> {
    let file = FileConfig::load(args.exp.config.as_deref())?;
    let split = args.exp.train_frac.is_some() || file.train_frac.is_some();
    let flags = Overrides {
        method: args.method,
        seed: args.exp.seed,
        train_frac: args.exp.train_frac,
        samples: args.exp.samples,
        ..Default::default()
    };
    let mut cfg = resolve(&file, &flags)?;
    cfg.problem = match (&args.data, args.function) {
        (Some(path), _) => {
            require_file(path)?;
            Problem::Csv(path.clone())
        }
        (None, Some(f)) => Problem::Function(f),
        (None, None) => unreachable!("clap requires --data or --function"),
    };
    let raw = cfg.load_raw()?;
    let trial_seed = cfg.trial_seed(0);
    let (train, test) = if split {
        let (tr, te) = cfg.split(&raw, trial_seed)?;
        (tr, Some(te))
    } else {
        let bounds = match cfg.problem {
            Problem::Function(f) => Some(f.domain()),
            Problem::Csv(_) => None,
        };
        (Scaler::fit(&raw, bounds)?.apply(&raw), None)
    };
    let model = cfg.train_model(&train, mix_seed(trial_seed, 1))?;
    let train_mae = mae(&model.predict_rows(&train.rows())?, train.targets())?;
    let test_mae = match &test {
        Some(t) => Some(mae(&model.predict_rows(&t.rows())?, t.targets())?),
        None => None,
    };
    let metrics = TrainMetrics {
        method: cfg.method,
        problem: cfg.problem.id(),
        seed: cfg.seed,
        train_rows: train.len(),
        test_rows: test.as_ref().map(|t| t.len()),
        train_mae,
        test_mae,
        rules: model.rule_count(),
        uncompacted_rules: model.uncompacted_rule_count(),
    };
    let doc = ModelDocument {
        method: cfg.method,
        problem: cfg.problem.id(),
        seed: cfg.seed,
        scaler: train.scaler().clone(),
        model,
    };
    doc.write_json(&args.out)?;
    if let Some(path) = &args.metrics {
        write_json(path, &metrics)?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&metrics).map_err(|e| CliError::Runtime(e.to_string()))?
    );
    Ok(())
}

fn load_model(path: &Path) -> CliResult<ModelDocument> {
    require_file(path)?;
    ModelDocument::read_json(path).map_err(|e| {
        CliError::Usage(format!("{} is not a valid model file: {e}", path.display()))
    })
}

fn eval(args: EvalArgs) -> CliResult<()> {
    let doc = load_model(&args.model)?;
    require_file(&args.data)?;
    let raw: RawData = read_csv_raw(&args.data)?;
    let value = doc.evaluate(&raw).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{value}");
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> CliResult<()> {
    let file = FileConfig::load(args.exp.config.as_deref())?;
    let flags = Overrides {
        seed: args.exp.seed,
        trials: args.trials,
        train_frac: args.exp.train_frac,
        samples: args.exp.samples,
        ..Default::default()
    };
    let base = resolve(&file, &flags)?;
    let mut problems: Vec<Problem> = args.function.iter().map(|f| Problem::Function(*f)).collect();
    for path in &args.data {
        require_file(path)?;
        problems.push(Problem::Csv(path.clone()));
    }
    if problems.is_empty() {
        return Err(CliError::Usage("give at least one --function or --data".into()));
    }
    let methods = if args.method.is_empty() {
        vec![base.method]
    } else {
        args.method.clone()
    };
    let jobs = args.jobs.or(file.jobs).unwrap_or(0);
    let mut report = BenchmarkReport::default();
    for problem in &problems {
        for &method in &methods {
            let mut cfg = base.clone();
            cfg.problem = problem.clone();
            cfg.method = method;
            let exp = run_benchmark(&cfg, jobs)?;
            let s = &exp.summary;
            match &s.test_mae {
                Some(a) => eprintln!(
                    "{} {}: test MAE mean {:.5} median {:.5} ({}/{} trials)",
                    exp.problem,
                    method,
                    a.mean,
                    a.median,
                    s.completed,
                    s.completed + s.failed
                ),
                None => eprintln!("{} {}: all {} trials failed", exp.problem, method, s.failed),
            }
            report.experiments.push(exp);
        }
    }
    report.write_json(&args.out)?;
    if let Some(path) = &args.csv {
        report.write_csv(path)?;
    }
    Ok(())
}

fn compare(args: CompareArgs) -> CliResult<()> {
    let mut experiments = Vec::new();
    for path in &args.reports {
        require_file(path)?;
        let report = BenchmarkReport::read_json(path).map_err(|e| {
            CliError::Usage(format!("{} is not a valid report: {e}", path.display()))
        })?;
        experiments.extend(report.experiments);
    }
    let cmp = compare_reports(&experiments, args.reference)?;
    print!("{}", cmp.render());
    if let Some(path) = &args.out {
        write_json(path, &cmp)?;
    }
    Ok(())
}

fn export_plot(args: ExportPlotArgs) -> CliResult<()> {
    let doc = load_model(&args.model)?;
    let rows = plot_grid(&doc, args.resolution)?;
    match &args.out {
        Some(path) => write_plot_csv(&rows, path)?,
        None => {
            let header = if rows.first().is_some_and(|r| r.len() == 2) {
                "x,y_pred"
            } else {
                "x1,x2,y_pred"
            };
            println!("{header}");
            for r in rows {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                println!("{}", cells.join(","));
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Compare(a) => compare(a),
        Command::ExportPlot(a) => export_plot(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Runtime(_) => 1,
            })
        }
    }
}
