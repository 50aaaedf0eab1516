//! `moglb`: generate instances, run experiments, tune the confidence width.
//!
//! Exit codes: 0 on success, 1 for invalid input, 2 for runtime failures.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moglb_core::config::GammaModeKind;
use moglb_core::harness::output::write_csv;
use moglb_core::harness::{tune_gamma, TuneReport};
use moglb_core::{
    run_experiment, AlgoKind, Error, Execution, ExperimentConfig, ProblemInstance, RunSummary,
};

/// Environment variable that replaces the default output directory.
const OUTPUT_DIR_ENV: &str = "MOGLB_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "moglb-out";
const DEFAULT_GRID: [f64; 4] = [0.001, 0.01, 0.1, 1.0];

#[derive(Parser)]
#[command(
    name = "moglb",
    version,
    about = "Multi-objective generalized linear bandit benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic instance and write it as JSON.
    Generate(GenerateArgs),
    /// Run every algorithm over several trials and write per-round records.
    Run(ExperimentArgs),
    /// Grid-search the tuned confidence width of MOGLB-UCB.
    TuneGamma(TuneArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Context dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Number of objectives.
    #[arg(long)]
    m: Option<usize>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Redraws allowed before instance generation gives up.
    #[arg(long)]
    max_attempts: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Output file (default: `<output dir>/instance.json`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaArg {
    Theoretical,
    Tuned,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Rounds per trial.
    #[arg(long = "T", visible_alias = "horizon")]
    horizon: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated roster, e.g. `moglb,pucb,sucb,pts`.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<String>>,
    #[arg(long, value_enum)]
    gamma_mode: Option<GammaArg>,
    /// Tuned width scale in [1e-3, 1].
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Regularizer (default max(1, kappa/2)).
    #[arg(long)]
    lambda: Option<f64>,
    /// Pinned instance file used by every trial.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Draw one instance and share it across trials.
    #[arg(long)]
    pin_instance: bool,
    /// Worker cap; 1 runs sequentially. Defaults to every core.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated values of c to try.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID)]
    grid: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run(args),
        Command::TuneGamma(args) => tune(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn base_config(common: &CommonArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    set(&mut cfg.dim, common.d);
    set(&mut cfg.num_objectives, common.m);
    set(&mut cfg.base_seed, common.seed);
    set(&mut cfg.max_attempts, common.max_attempts);
    Ok(cfg)
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let mut cfg = base_config(&args.common)?;
    set(&mut cfg.horizon, args.horizon);
    set(&mut cfg.trials, args.trials);
    if let Some(names) = &args.algos {
        cfg.algorithms = names
            .iter()
            .map(|n| n.parse::<AlgoKind>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(mode) = args.gamma_mode {
        cfg.gamma_mode = match mode {
            GammaArg::Theoretical => GammaModeKind::Theoretical,
            GammaArg::Tuned => GammaModeKind::Tuned,
        };
    }
    set(&mut cfg.c, args.c);
    set(&mut cfg.delta, args.delta);
    if args.lambda.is_some() {
        cfg.lambda = args.lambda;
    }
    if args.instance.is_some() {
        cfg.instance = args.instance.clone();
    }
    cfg.pin_instance |= args.pin_instance;
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    })
}

fn ensure_parent(path: &Path) -> Result<(), Error> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let cfg = base_config(&args.common)?;
    cfg.validate()?;
    let path = match args.out {
        Some(p) => p,
        None => output_dir(&cfg).join("instance.json"),
    };
    let instance =
        ProblemInstance::generate(cfg.dim, cfg.num_objectives, cfg.base_seed, cfg.max_attempts)?;
    ensure_parent(&path)?;
    instance.save(&path)?;

    let links: Vec<String> = instance.links().iter().map(ToString::to_string).collect();
    println!("arms: {}", instance.num_arms());
    println!(
        "pareto front: {} {:?}",
        instance.true_front().len(),
        instance.true_front().indices()
    );
    println!("links: {}", links.join(", "));
    println!("wrote {}", path.display());
    Ok(())
}

fn run(args: ExperimentArgs) -> Result<(), Error> {
    let cfg = experiment_config(&args)?;
    let out = run_experiment(&cfg, Execution::from_jobs(args.jobs))?;

    let dir = output_dir(&cfg);
    fs::create_dir_all(&dir)?;
    let csv = dir.join("records.csv");
    let mut w = BufWriter::new(File::create(&csv)?);
    write_csv(&out.records, &mut w)?;
    w.flush()?;
    fs::write(dir.join("summary.json"), out.summary.to_json())?;

    print_summary(&out.summary);
    println!(
        "wrote {} ({} rows) and summary.json",
        csv.display(),
        out.records.len()
    );
    Ok(())
}

fn print_summary(summary: &RunSummary) {
    println!(
        "{:<6} {:>7} {:>14} {:>12} {:>8} {:>8}",
        "algo", "t", "regret", "sd", "ji", "sd"
    );
    for a in &summary.algorithms {
        for cp in &a.checkpoints {
            let (ji, ji_sd) = match &cp.jaccard {
                Some(j) => (format!("{:.4}", j.mean), format!("{:.4}", j.std)),
                None => ("-".into(), "-".into()),
            };
            println!(
                "{:<6} {:>7} {:>14.4} {:>12.4} {:>8} {:>8}",
                a.algo, cp.t, cp.regret.mean, cp.regret.std, ji, ji_sd
            );
        }
    }
}

fn tune(args: TuneArgs) -> Result<(), Error> {
    let cfg = experiment_config(&args.experiment)?;
    let report = tune_gamma(&cfg, &args.grid, Execution::from_jobs(args.experiment.jobs))?;
    print_tune(&report);

    let dir = output_dir(&cfg);
    fs::create_dir_all(&dir)?;
    let path = dir.join("tune.json");
    fs::write(&path, report.to_json())?;
    println!("wrote {}", path.display());
    Ok(())
}

fn print_tune(report: &TuneReport) {
    println!("{:>10} {:>16} {:>12}", "c", "final regret", "sd");
    for row in &report.rows {
        let mark = if row.c == report.best_c {
            "  *best"
        } else {
            ""
        };
        println!(
            "{:>10} {:>16.4} {:>12.4}{mark}",
            row.c, row.mean_final_regret, row.std_final_regret
        );
    }
    println!("best c: {}", report.best_c);
}
