use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use cbi_cli::{run, Axis, CliError, Format, Mode, Scenario};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Conservative reliability assessment from partial prior knowledge.
#[derive(Parser)]
#[command(name = "cbi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Miles needed to support a claimed bound.
    Q1(Inputs),
    /// Best bound supported by the miles driven.
    Q2(Inputs),
    /// Extra miles needed after a failure.
    Q3(Inputs),
    /// Miles needed in a new environment given miles in an old one.
    Q4(Inputs),
    /// Old-environment miles that minimize the new-environment requirement.
    Q5(Inputs),
    /// Classical, conjugate and conservative requirements side by side.
    Compare(Inputs),
    /// Consequences of reusing the wrong worst-case prior.
    Fallacy(Inputs),
    /// Brute-force grid and simulation checks.
    Oracle(Inputs),
    /// Sweep one input and print a table.
    Curve(Inputs),
}

impl Command {
    fn split(self) -> (Mode, Inputs) {
        match self {
            Command::Q1(i) => (Mode::Q1, i),
            Command::Q2(i) => (Mode::Q2, i),
            Command::Q3(i) => (Mode::Q3, i),
            Command::Q4(i) => (Mode::Q4, i),
            Command::Q5(i) => (Mode::Q5, i),
            Command::Compare(i) => (Mode::Compare, i),
            Command::Fallacy(i) => (Mode::Fallacy, i),
            Command::Oracle(i) => (Mode::Oracle, i),
            Command::Curve(i) => (Mode::Curve, i),
        }
    }
}

#[derive(Args)]
struct Inputs {
    /// JSON scenario file; flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Smallest plausible failure rate.
    #[arg(long)]
    pl: Option<f64>,
    /// Engineering goal on the failure rate.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Prior confidence that the goal is met.
    #[arg(long)]
    theta: Option<f64>,
    /// Prior confidence that the new environment is no worse than the old.
    #[arg(long)]
    phi: Option<f64>,
    /// Claimed bound on the failure rate.
    #[arg(long)]
    bound: Option<f64>,
    /// Required posterior confidence.
    #[arg(long)]
    confidence: Option<f64>,
    /// Failures observed.
    #[arg(long)]
    k: Option<u64>,
    /// Miles driven.
    #[arg(long)]
    n: Option<f64>,
    /// Miles driven in the old environment.
    #[arg(long)]
    na: Option<f64>,
    /// Miles driven in the new environment.
    #[arg(long)]
    nb: Option<f64>,
    /// Failure-free miles before the first failure.
    #[arg(long)]
    n1: Option<f64>,
    /// Benchmark rate for the classical power calculation.
    #[arg(long)]
    reference: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// True rate used by the simulation.
    #[arg(long)]
    sim_rate: Option<f64>,
    /// Grid points per decade of the brute-force search.
    #[arg(long)]
    resolution: Option<usize>,
    /// Mass steps of the brute-force search.
    #[arg(long)]
    beta_steps: Option<usize>,
    /// Prior confidences compared by `curve --axis bound`.
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    /// Cross-confidences compared by `curve --axis na`.
    #[arg(long, value_delimiter = ',')]
    phis: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

impl Inputs {
    fn scenario(self, mode: Mode) -> Result<(Scenario, Format), CliError> {
        let base = match &self.scenario {
            Some(path) => Scenario::from_file(path)?,
            None => Scenario::default(),
        };
        let flags = Scenario {
            mode: Some(mode),
            pl: self.pl,
            epsilon: self.epsilon,
            theta: self.theta,
            phi: self.phi,
            bound: self.bound,
            confidence: self.confidence,
            k: self.k,
            n: self.n,
            na: self.na,
            nb: self.nb,
            n1: self.n1,
            reference: self.reference,
            seed: self.seed,
            trials: self.trials,
            sim_rate: self.sim_rate,
            resolution: self.resolution,
            beta_steps: self.beta_steps,
            thetas: self.thetas,
            phis: self.phis,
            axis: self.axis,
            from: self.from,
            to: self.to,
            points: self.points,
        };
        Ok((base.overlay(flags).resolve(mode), self.format))
    }
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let text = e.render().to_string();
            let message = text
                .trim()
                .trim_start_matches("error: ")
                .lines()
                .next()
                .unwrap_or_default();
            return fail(&CliError::Usage(message.to_string()));
        }
    };
    let (mode, inputs) = cli.command.split();
    let result = inputs
        .scenario(mode)
        .and_then(|(scenario, format)| Ok((run(&scenario)?, format)));
    match result {
        Ok((report, format)) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(format).as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
