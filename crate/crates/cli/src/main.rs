//! `wavetrace`: packet-trace scaling analysis driver.
//!
//! Exit codes: 0 success, 1 input error (unreadable or malformed input,
//! bad usage), 2 analysis precondition failure (input fine, requested
//! analysis impossible on it).

mod analysis;
mod args;
mod commands;
mod config;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;
use wavetrace_core::ErrorClass;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real usage
            // errors print to stderr.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let file = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(file) => file,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        args::Command::Convert(a) => commands::convert::run(a, &file),
        args::Command::Summary(a) => commands::summary::run(a, &file),
        args::Command::Classify(a) => commands::classify::run(a, &file),
        args::Command::Bitrate(a) => commands::bitrate::run(a, &file),
        args::Command::Ldiag(a) => commands::ldiag::run(a, &file),
        args::Command::Stationarity(a) => commands::stationarity::run(a, &file),
        args::Command::Topflows(a) => commands::topflows::run(a, &file),
        args::Command::Synth(a) => commands::synth::run(a, &file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<wavetrace_core::Error>() {
        Some(core_err) => match core_err.class() {
            ErrorClass::Input => 1,
            ErrorClass::Precondition => 2,
        },
        None => 1,
    }
}
