//! Command-line front end. Every subcommand loads a model file, runs exact
//! computations, and emits a JSON (or plain-text) report on standard output
//! plus a one-line summary on standard error.
//!
//! Exit codes: 0 when every check passed, 1 when a mathematical check failed
//! or well-formed input was rejected on mathematical grounds, 2 when the
//! input could not be parsed at all.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use courant_core::driver::{
    ce_report, consequences_report, curvature_report, lc_space_report, sequence_report,
    validate_report, verify_report, ConnChoice,
};
use courant_core::model::{load_connection, load_model, FileError};
use courant_core::rat::{parse_q, Q};
use courant_core::report::Report;

#[derive(Parser)]
#[command(name = "courant", about = "Exact curvature engine for transitive Courant algebroids over Lie groups", version)]
struct Cli {
    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load a model file and check the Courant algebroid axioms.
    Validate { path: PathBuf },
    /// Curvature blocks and torsion residuals of a generalized connection.
    Curvature {
        path: PathBuf,
        /// Base connection parameter for the V+ block.
        #[arg(long, value_parser = parse_q_arg, default_value = "-1/3", allow_hyphen_values = true)]
        lambda_plus: Q,
        /// Base connection parameter for the V- block.
        #[arg(long, value_parser = parse_q_arg, default_value = "1/3", allow_hyphen_values = true)]
        lambda_minus: Q,
        /// Fiber parameter in front of the Cartan form.
        #[arg(long, value_parser = parse_q_arg, default_value = "1/3", allow_hyphen_values = true)]
        mu: Q,
        /// Connection-tensor file; overrides the three family parameters.
        #[arg(long)]
        tensors: Option<PathBuf>,
    },
    /// Cross-check the engine on seeded random connections.
    Verify {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Describe the space of flat torsion-free connections.
    LcSpace { path: PathBuf },
    /// Ranks and exactness of the tensor sequence S3 -> S2@V -> V@L2 -> L3.
    Sequence { path: PathBuf },
    /// Betti numbers of the Lie algebra cohomology of the base.
    Ce {
        path: PathBuf,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Structural consequences of flatness for a family connection.
    Consequences {
        path: PathBuf,
        #[arg(long, value_parser = parse_q_arg, default_value = "-1/3", allow_hyphen_values = true)]
        lambda_plus: Q,
        #[arg(long, value_parser = parse_q_arg, default_value = "1/3", allow_hyphen_values = true)]
        lambda_minus: Q,
        #[arg(long, value_parser = parse_q_arg, default_value = "1/3", allow_hyphen_values = true)]
        mu: Q,
    },
}

fn parse_q_arg(s: &str) -> Result<Q, String> {
    parse_q(s).ok_or_else(|| format!("'{s}' is not an exact rational (use integers or p/q)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli.cmd) {
        Ok(report) => {
            let code = if report.passed() { 0 } else { 1 };
            (report, code)
        }
        Err(e) => {
            let code = e.exit_code();
            let mut report = Report::error(cmd_name(&cli.cmd), &cmd_path(&cli.cmd), &e.to_string());
            if code == 1 {
                // Well-formed input rejected on mathematical grounds.
                report.status = "fail".into();
            }
            (report, code)
        }
    };
    match cli.format {
        Format::Json => print!("{}", report.render_json()),
        Format::Text => print!("{}", report.render_text()),
    }
    eprintln!("{}", report.summary_line());
    ExitCode::from(code as u8)
}

fn cmd_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Validate { .. } => "validate",
        Cmd::Curvature { .. } => "curvature",
        Cmd::Verify { .. } => "verify",
        Cmd::LcSpace { .. } => "lc-space",
        Cmd::Sequence { .. } => "sequence",
        Cmd::Ce { .. } => "ce",
        Cmd::Consequences { .. } => "consequences",
    }
}

fn cmd_path(cmd: &Cmd) -> String {
    let p = match cmd {
        Cmd::Validate { path }
        | Cmd::Curvature { path, .. }
        | Cmd::Verify { path, .. }
        | Cmd::LcSpace { path }
        | Cmd::Sequence { path }
        | Cmd::Ce { path, .. }
        | Cmd::Consequences { path, .. } => path,
    };
    p.display().to_string()
}

fn run(cmd: &Cmd) -> Result<Report, FileError> {
    match cmd {
        Cmd::Validate { path } => Ok(validate_report(&load_model(path)?)),
        Cmd::Curvature { path, lambda_plus, lambda_minus, mu, tensors } => {
            let model = load_model(path)?;
            let choice = match tensors {
                Some(p) => ConnChoice::Explicit(load_connection(&model, p)?),
                None => ConnChoice::Family { lp: lambda_plus, lm: lambda_minus, mu },
            };
            Ok(curvature_report(&model, choice))
        }
        Cmd::Verify { path, seed, trials } => Ok(verify_report(&load_model(path)?, *seed, *trials)),
        Cmd::LcSpace { path } => Ok(lc_space_report(&load_model(path)?)),
        Cmd::Sequence { path } => Ok(sequence_report(&load_model(path)?)),
        Cmd::Ce { path, max_degree } => ce_report(&load_model(path)?, *max_degree),
        Cmd::Consequences { path, lambda_plus, lambda_minus, mu } => {
            Ok(consequences_report(&load_model(path)?, lambda_plus, lambda_minus, mu))
        }
    }
}
