//! `trustlp`: game value, informativeness and checks for a utility matrix.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse error, 3 invalid or
//! inapplicable instance, 4 resource limit, 5 failed verification or
//! certification.

mod commands;
mod report;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trustlp::format::{parse_matrix, parse_rational, render_rational};
use trustlp::{Error, Rational, UtilityMatrixQ};

use report::Report;

#[derive(Parser)]
#[command(
    name = "trustlp",
    version,
    about = "Sender game value and informativeness via trust-constrained LPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Game value with its optimal kernel, dual and certificate
    Sgv(Common),
    /// Informativeness, witness strategies and bounds from the game value
    Info {
        #[command(flatten)]
        common: Common,
        /// Solve the single joint program instead of the two-stage one
        #[arg(long)]
        joint_informativeness: bool,
    },
    /// Sender strategies approaching the game value
    EpsSes {
        #[command(flatten)]
        common: Common,
        /// Perturbation size, in (0, smallest positive diagonal of the kernel]
        #[arg(long, value_parser = rational_arg)]
        delta: Option<Rational>,
        /// Sequence indices
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        ks: Vec<u64>,
    },
    /// Obfuscation graph, shape, matching and closed forms
    Graph(Common),
    /// Randomized against deterministic informativeness
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the LP against the brute-force oracles
    Verify {
        #[command(flatten)]
        common: Common,
        /// Grid resolutions (default: 2, 4, 8, 16 as far as the budget allows)
        #[arg(long, value_delimiter = ',')]
        grid: Vec<u32>,
        /// Seed for the random best-response checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random senders whose best responses are checked
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Matrix file, or `-` for stdin
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Subtract the diagonal from each column instead of rejecting it
    #[arg(long)]
    normalize: bool,
    /// Add rounded decimals next to exact summary values
    #[arg(long)]
    decimal: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 2,
        Error::InvalidInstance(_) | Error::NotApplicable(_) => 3,
        Error::ResourceLimit(_) => 4,
        Error::CertificationFailure(_) | Error::VerificationFailure(_) => 5,
    }
}

fn load(common: &Common) -> Result<UtilityMatrixQ, (u8, String)> {
    let mut text = String::new();
    let read = if common.input.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(&common.input).map(|t| text = t)
    };
    read.map_err(|e| (1, format!("cannot read {}: {e}", common.input.display())))?;
    let parsed = parse_matrix::<Rational>(&text, common.normalize)
        .map_err(|e| (exit_code(&e), e.to_string()))?;
    if common.normalize && parsed.shift != Rational::from_integer(0.into()) {
        eprintln!(
            "note: diagonal removed; reported utilities exclude the constant {}",
            render_rational(&parsed.shift)
        );
    }
    Ok(parsed.matrix)
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let common = match &cli.command {
        Command::Sgv(c) | Command::Graph(c) => c,
        Command::Info { common, .. }
        | Command::EpsSes { common, .. }
        | Command::Compare { common }
        | Command::Verify { common, .. } => common,
    };
    let u = load(common)?;
    let name = match &cli.command {
        Command::Sgv(_) => "sgv",
        Command::Info { .. } => "info",
        Command::EpsSes { .. } => "eps-ses",
        Command::Graph(_) => "graph",
        Command::Compare { .. } => "compare",
        Command::Verify { .. } => "verify",
    };
    let report = Report::new(name, u.q(), common.decimal);
    let outcome = match &cli.command {
        Command::Sgv(_) => commands::sgv(&u, report),
        Command::Info {
            joint_informativeness,
            ..
        } => commands::info(&u, *joint_informativeness, report),
        Command::EpsSes { delta, ks, .. } => commands::eps_ses(&u, ks, delta.clone(), report),
        Command::Graph(_) => commands::graph(&u, report),
        Command::Compare { .. } => commands::compare(&u, report),
        Command::Verify {
            grid,
            seed,
            samples,
            ..
        } => {
            let grids = if grid.is_empty() {
                commands::default_grids(u.q())
            } else {
                grid.clone()
            };
            commands::verify(&u, &grids, *seed, *samples, report)
        }
    };
    let (value, failure) = outcome.map_err(|e| (exit_code(&e), e.to_string()))?;
    let text = match common.format {
        Format::Text => report::to_text(&value),
        Format::Json => report::to_json(&value),
    };
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| (1, format!("cannot write output: {e}")))?;
    match failure {
        Some(e) => Err((exit_code(&e), e.to_string())),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
