//! Command-line driver for the quantile-robust solvers in `qrk-core`.
//!
//! Four subcommands cover the workflow end to end: `generate` writes a
//! corrupted benchmark system to disk, `solve` runs one solver on an ingested
//! system, `experiment` runs the named parameter sweeps behind the standard
//! plots, and `check-theory` exercises the diagnostic checks and reports a
//! machine-readable pass/fail summary.
//!
//! Every output file is a pure function of the flags: seeds are explicit,
//! floats are written in shortest round-trip form, and nothing records
//! timestamps or host details, so reruns are byte-identical.

pub mod args;
pub mod check;
pub mod experiment;
pub mod generate;
pub mod solve;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
/// Runtime failure: unreadable input, solver breakdown, or a failed check.
pub const EXIT_FAILURE: i32 = 1;
/// Bad invocation: conflicting flags or out-of-range parameters.
pub const EXIT_USAGE: i32 = 2;

/// Error carrying the exit code it should terminate the process with.
#[derive(Debug)]
pub struct CmdError {
    pub message: String,
    pub code: i32,
}

impl CmdError {
    pub fn usage(message: impl Into<String>) -> Self {
        CmdError {
            message: message.into(),
            code: EXIT_USAGE,
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CmdError {
            message: message.into(),
            code: EXIT_FAILURE,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<qrk_core::Error> for CmdError {
    fn from(e: qrk_core::Error) -> Self {
        use qrk_core::Error as E;
        // Parameter-shaped problems are usage errors; everything else (I/O,
        // malformed data, numerical breakdown) is a runtime failure.
        let code = match e {
            E::QuantileOutOfRange { .. }
            | E::BetaOutOfRange { .. }
            | E::CorruptionCountTooLarge { .. }
            | E::InvalidConfig { .. }
            | E::MissingXStar { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        CmdError {
            message: e.to_string(),
            code,
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, CmdError>;

/// Dispatches a parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if cli.threads > 0 {
        // Ignore the error from configuring the pool twice (tests call run()
        // repeatedly in one process); the first configuration wins.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Solve(args) => solve::run(args),
        Command::Experiment(args) => experiment::run(args),
        Command::CheckTheory(args) => check::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
