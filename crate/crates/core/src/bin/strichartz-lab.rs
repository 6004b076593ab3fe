use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use strichartz_lab::harness::{run, write_outcome, Config, Experiment};
use strichartz_lab::LabError;

/// Numerical experiments on the sharp one-dimensional Strichartz inequality.
#[derive(Parser)]
#[command(name = "strichartz-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ratio of the Gaussian and the discrete Fourier foundations.
    SharpConstant(RunArgs),
    /// Euler-Lagrange residual of the Gaussian and the Picard extremizer search.
    Iterate(RunArgs),
    /// Bilinear estimate across frequency separations.
    BilinearSweep(RunArgs),
    /// Multiplicative functional equation on random constraint sextuples.
    FunctionalResidual(RunArgs),
    /// Exact golden-ratio power sums.
    PowerSums(RunArgs),
    /// Fourier decay, bootstrap quantities and analytic continuation.
    DecayReport(RunArgs),
    /// Space-time and frequency-side sextic forms against each other.
    QCrosscheck(RunArgs),
    /// Print the default configuration of an experiment.
    PrintConfig {
        experiment: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file; the experiment's defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<bool, LabError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => experiment.default_config(),
    };
    if let Some(seed) = args.seed {
        config.set("seed", &seed.to_string());
    }
    let outcome = run(experiment, &config)?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
    write_outcome(&out, &outcome)?;
    let report = &outcome.report;
    for check in &report.checks {
        println!(
            "[{}] criterion {} {}: {:.6e} {} {:.3e}",
            if check.passed { "pass" } else { "FAIL" },
            check.criterion,
            check.name,
            check.value,
            check.relation,
            check.threshold
        );
    }
    let timing = &report.timing;
    match timing.limit_s {
        Some(limit) => println!(
            "[{}] wall clock {:.2} s (limit {limit} s)",
            if timing.within_limit { "pass" } else { "FAIL" },
            timing.wall_clock_s
        ),
        None => println!("wall clock {:.2} s", timing.wall_clock_s),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("report written to {}", out.join("report.json").display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::SharpConstant(a) => (Experiment::SharpConstant, a),
        Command::Iterate(a) => (Experiment::Iterate, a),
        Command::BilinearSweep(a) => (Experiment::BilinearSweep, a),
        Command::FunctionalResidual(a) => (Experiment::FunctionalResidual, a),
        Command::PowerSums(a) => (Experiment::PowerSums, a),
        Command::DecayReport(a) => (Experiment::DecayReport, a),
        Command::QCrosscheck(a) => (Experiment::QCrosscheck, a),
        Command::PrintConfig { experiment } => {
            return match experiment.parse::<Experiment>() {
                Ok(e) => {
                    print!("{}", e.default_config().to_text());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    match execute(experiment, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ LabError::Usage(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
