//! `pa-secdeg`: command-line front end for the `secdeg` library.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 a bound or identity
//! check failed. Diagnostics go to stderr as one JSON object per line.

mod args;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::Cli;

pub(crate) enum Outcome {
    Ok,
    CheckFailed(serde_json::Value),
}

pub(crate) fn diagnostic(v: serde_json::Value) {
    eprintln!("{v}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            diagnostic(
                json!({"level": "error", "kind": "usage", "message": e.to_string().trim_end()}),
            );
            return ExitCode::from(1);
        }
    };
    match run::dispatch(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed(details)) => {
            diagnostic(json!({"level": "check_failed", "details": details}));
            ExitCode::from(2)
        }
        Err(e) => {
            diagnostic(json!({"level": "error", "kind": e.kind, "message": e.message}));
            ExitCode::from(1)
        }
    }
}
