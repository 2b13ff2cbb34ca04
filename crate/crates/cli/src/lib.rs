//! The `qflat` command-line tool: argument grammar, document builders and
//! exit-status policy. `main` only wires these to the process.

pub mod args;
mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qflat_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Outcome of a run that produced a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CellFailed,
    TheoremMismatch,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CellFailed => 2,
            Status::TheoremMismatch => 3,
        }
    }
}

pub const EXIT_CONFIG: i32 = 1;

#[derive(Debug)]
pub struct Document {
    pub text: String,
    pub status: Status,
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::List(a) => &a.out,
        Command::Qtable(a) => &a.out,
        Command::Curvature(a) => &a.out,
        Command::Centrality(a) => &a.out,
        Command::Scan(a) => &a.out,
        Command::VerifyAsymptotics(a) => &a.out,
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Centrality(_) | Command::Scan(_) => Format::Json,
        _ => Format::Csv,
    }
}

/// Builds the document for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Document, CliError> {
    let out = output_args(&cli.command);
    let format = out.format.unwrap_or_else(|| default_format(&cli.command));
    if out.timestamps && format != Format::Json {
        return Err(CliError::Config("--timestamps requires --format json".into()));
    }
    let body = || match &cli.command {
        Command::List(_) => commands::list(format, out.timestamps),
        Command::Qtable(a) => commands::qtable(a, format),
        Command::Curvature(a) => commands::curvature(a, format),
        Command::Centrality(a) => commands::centrality(a, format),
        Command::Scan(a) => commands::scan(a, format),
        Command::VerifyAsymptotics(a) => commands::verify_asymptotics(a, format),
    };
    let threads = match cli.threads {
        Some(k) => Some(k),
        None => match std::env::var("QFLAT_THREADS") {
            Ok(v) => Some(args::parse_threads(&v).map_err(|e| CliError::Config(format!("QFLAT_THREADS: {e}")))?),
            Err(_) => None,
        },
    };
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

/// Parses `argv`, runs, writes the document, and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let doc = match execute(&cli) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("qflat: {e}");
            return EXIT_CONFIG;
        }
    };
    let written = match &output_args(&cli.command).output {
        Some(path) => std::fs::write(path, &doc.text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(doc.text.as_bytes()).and_then(|_| stdout.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("qflat: cannot write output: {e}");
        return EXIT_CONFIG;
    }
    doc.status.exit_code()
}
