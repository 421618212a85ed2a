//! `evosand`: central-pile patterns, avalanche runs and power-law fits.

// println! that ignores a closed stdout
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

mod avalanche;
mod error;
mod fit;
mod manifest;
mod output;
mod pattern;
mod stabilize;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use evosand::stats::Alternative;
use evosand::TerminationMode;

use error::{code, CliError};

#[derive(Parser, Debug)]
#[command(name = "evosand", version, about = "Sandpiles on evolving graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stabilize a central pile on an infinite lattice and render it.
    Pattern(PatternArgs),
    /// Drive a finite lattice one grain at a time and record avalanche sizes.
    Avalanche(AvalancheArgs),
    /// Fit a discrete power law to the `size` column of a CSV file.
    Fit(FitArgs),
    /// Stabilize a configuration on an explicit schedule given as JSON.
    Stabilize(StabilizeArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pgm,
    Png,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Pgm => "pgm",
            Format::Png => "png",
            Format::Csv => "csv",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    FirstQuiet,
    FullPeriodQuiet,
}

impl From<Mode> for TerminationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FirstQuiet => TerminationMode::FirstQuiet,
            Mode::FullPeriodQuiet => TerminationMode::FullPeriodQuiet,
        }
    }
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::FirstQuiet => "first-quiet",
            Mode::FullPeriodQuiet => "full-period-quiet",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Compare {
    Exponential,
    Lognormal,
}

impl From<Compare> for Alternative {
    fn from(c: Compare) -> Self {
        match c {
            Compare::Exponential => Alternative::Exponential,
            Compare::Lognormal => Alternative::Lognormal,
        }
    }
}

#[derive(Args, Debug)]
pub struct PatternArgs {
    /// static, model-d, model-g, doubled, or a JSON file with a rule list
    #[arg(long)]
    pub schedule: String,
    /// Grains placed at the origin
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub grains: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Output formats; the first is written to --out, others next to it.
    /// Defaults to the extension of --out, else pgm.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    #[arg(long, value_enum, default_value = "full-period-quiet")]
    pub mode: Mode,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: Option<u64>,
    /// Write one line per round to this file
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AvalancheArgs {
    /// model-g, model-d, static, doubled, or a JSON schedule file
    #[arg(long)]
    pub schedule: String,
    #[arg(long, default_value_t = 50)]
    pub width: usize,
    #[arg(long, default_value_t = 50)]
    pub height: usize,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "first-quiet")]
    pub mode: Mode,
    /// Round limit per avalanche
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: Option<u64>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// CSV file with a `size` column
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Alternatives for the likelihood-ratio test
    #[arg(long, value_enum, value_delimiter = ',', default_value = "exponential")]
    pub compare: Vec<Compare>,
    /// Bootstrap goodness-of-fit resamples (1000 if given without a value)
    #[arg(long, num_args = 0..=1, default_missing_value = "1000")]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct StabilizeArgs {
    /// JSON schedule: period, n_vertices, sink, stages
    #[arg(long)]
    pub schedule: PathBuf,
    /// Comma-separated grains on the non-sink vertices, in vertex order
    #[arg(long, value_delimiter = ',')]
    pub config: Vec<u64>,
    #[arg(long, value_enum, default_value = "full-period-quiet")]
    pub mode: Mode,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: Option<u64>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(code::USAGE as u8),
            };
        }
    };
    let result = match cli.command {
        Command::Pattern(a) => pattern::run(a),
        Command::Avalanche(a) => avalanche::run(a),
        Command::Fit(a) => fit::run(a),
        Command::Stabilize(a) => stabilize::run(a),
    };
    match result {
        Ok(c) => ExitCode::from(c as u8),
        Err(CliError { code, message }) => {
            eprintln!("evosand: {message}");
            ExitCode::from(code as u8)
        }
    }
}
