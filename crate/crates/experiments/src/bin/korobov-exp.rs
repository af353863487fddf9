use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use korobov_experiments::{run_and_write, ExperimentConfig, ExperimentKind, Result, RunOptions};

#[derive(Parser)]
#[command(
    name = "korobov-exp",
    version,
    about = "Rate sweeps and inequality checks for korobov-relu"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximation error of the constructed nets against width m.
    ApproxRate(RunArgs),
    /// Excess misclassification of ERM against N under the learning coupling.
    LearnRate(RunArgs),
    /// The same under the Tsybakov-noise coupling (η = 2).
    NoiseRate(RunArgs),
    /// Greedy ε-nets of H_m against the covering-number bound.
    CoveringCheck(RunArgs),
    /// Jackson, Parseval, kernel, Young, v, comparison, variance, ε* and noise checks.
    InequalitySuite(RunArgs),
    /// Print the default configuration of one experiment, or of all.
    Defaults {
        #[arg(value_enum)]
        experiment: Option<Kind>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Added to every seed.
    #[arg(long, default_value_t = 0)]
    seed_offset: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Kind {
    ApproxRate,
    LearnRate,
    NoiseRate,
    CoveringCheck,
    InequalitySuite,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::ApproxRate => ExperimentKind::ApproxRate,
            Kind::LearnRate => ExperimentKind::LearnRate,
            Kind::NoiseRate => ExperimentKind::NoiseRate,
            Kind::CoveringCheck => ExperimentKind::CoveringCheck,
            Kind::InequalitySuite => ExperimentKind::InequalitySuite,
        }
    }
}

fn load(kind: ExperimentKind, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::defaults(kind),
    };
    if cfg.experiment != kind {
        return Err(korobov_experiments::ExpError::Config(format!(
            "config describes {}, not {kind}",
            cfg.experiment
        )));
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.offset_seeds(args.seed_offset);
    Ok(cfg)
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<bool> {
    let cfg = load(kind, args)?;
    let outcome = run_and_write(&cfg, RunOptions { jobs: args.jobs })?;
    let report = &outcome.report;
    if let (Some(fit), Some(theory)) = (&report.fit, report.theoretical_exponent) {
        println!(
            "fitted slope {:.4} (r² {:.3}), theoretical {:.4}",
            fit.slope, fit.r_squared, theory
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!(
        "wrote {} rows to {}",
        outcome.rows.len(),
        cfg.output_dir.join("results.csv").display()
    );
    Ok(report.all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::ApproxRate(a) => (ExperimentKind::ApproxRate, a),
        Command::LearnRate(a) => (ExperimentKind::LearnRate, a),
        Command::NoiseRate(a) => (ExperimentKind::NoiseRate, a),
        Command::CoveringCheck(a) => (ExperimentKind::CoveringCheck, a),
        Command::InequalitySuite(a) => (ExperimentKind::InequalitySuite, a),
        Command::Defaults { experiment } => {
            let kinds: Vec<ExperimentKind> = match experiment {
                Some(k) => vec![(*k).into()],
                None => ExperimentKind::ALL.to_vec(),
            };
            let docs: Vec<ExperimentConfig> = kinds.into_iter().map(ExperimentConfig::defaults).collect();
            let text = if docs.len() == 1 {
                serde_json::to_string_pretty(&docs[0])
            } else {
                serde_json::to_string_pretty(&docs)
            };
            println!("{}", text.expect("defaults serialize"));
            return ExitCode::SUCCESS;
        }
    };
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
