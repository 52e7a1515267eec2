//! `asep`: exact stationary measures, oracle checks and identity suites for
//! the open ASEP.

mod commands;
mod params;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use params::ParamArgs;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 2.
    Usage(String),
    /// A computation failed; exit code 1.
    Failure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Args)]
struct FormatArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

impl FormatArgs {
    fn format(self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Text
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "asep", version, about = "Exact stationary measures of the open ASEP")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Exact stationary distribution on L sites.
    Stationary {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "L")]
        l: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Compare against the brute-force Markov-chain solution.
    OracleCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "L")]
        l: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Current J for L = 2..=L_max and the sign-reversal point.
    CurrentProfile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "L-max", default_value_t = 10)]
        l_max: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Askey-Wilson checks of φ₀ for one parameter quadruple.
    AwVerify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        ortho_max: usize,
        /// Comma-separated grid of non-zero rationals.
        #[arg(long, default_value = "1,2,1/3")]
        t: String,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// q-series identities over seeded random rational draws.
    IdentitySuite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// q = 0 closed forms and resolvent series.
    TasepSeries {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Matrix model: associativity gap and finite-case checks.
    MatrixDemo {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 500)]
        trunc: usize,
        #[arg(long, default_value_t = 5)]
        max_word: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        fmt: FormatArgs,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Stationary { params, l, fmt } => commands::stationary(&params, l, fmt.format()),
        Cmd::OracleCheck { params, l, fmt } => commands::oracle_check(&params, l, fmt.format()),
        Cmd::CurrentProfile { params, l_max, fmt } => commands::current_profile(&params, l_max, fmt.format()),
        Cmd::AwVerify {
            params,
            n_max,
            ortho_max,
            t,
            fmt,
        } => commands::aw_verify(&params, n_max, ortho_max, &t, fmt.format()),
        Cmd::IdentitySuite {
            seed,
            draws,
            n_max,
            fmt,
        } => commands::identity_suite(seed, draws, n_max, fmt.format()),
        Cmd::TasepSeries { params, order, fmt } => commands::tasep_series(&params, order, fmt.format()),
        Cmd::MatrixDemo {
            params,
            trunc,
            max_word,
            tol,
            fmt,
        } => commands::matrix_demo(&params, trunc, max_word, tol, fmt.format()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
