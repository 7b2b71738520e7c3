//! `removal-lab`: batch experiments on triangle systems in `F_p^n`.
//!
//! Every subcommand writes `<name>.json` (and `<name>.csv` when it produces a
//! table) to the output directory and prints a one-line summary.
//!
//! Exit codes: 0 success, 2 invalid input, 3 capacity or budget exhausted,
//! 64 usage error.

mod args;
mod commands;
mod config;
mod instance;
mod record;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::Cli;
use record::{write_outputs, ExperimentRecord};

const EXIT_VALIDATION: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_USAGE: u8 = 64;

fn parse_cli(argv: Vec<String>) -> Result<Cli, ExitCode> {
    let clap_exit = |e: clap::Error| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
            _ => ExitCode::from(EXIT_USAGE),
        }
    };
    let argv = match config::config_path(&argv) {
        Some(path) => config::merge(&argv, Path::new(&path)).map_err(|e| {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        })?,
        None => argv,
    };
    let matches = Cli::command().try_get_matches_from(&argv).map_err(clap_exit)?;
    Cli::from_arg_matches(&matches).map_err(clap_exit)
}

/// Capacity errors from the library map to 3; everything else to 2.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    let capacity = err
        .chain()
        .filter_map(|e| e.downcast_ref::<removal_lab::Error>())
        .any(removal_lab::Error::is_capacity);
    if capacity {
        EXIT_CAPACITY
    } else {
        EXIT_VALIDATION
    }
}

fn main() -> ExitCode {
    let cli = match parse_cli(std::env::args().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    let started = Instant::now();
    let outcome = match commands::run(&cli) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(exit_code_for(&err));
        }
    };
    let record = ExperimentRecord {
        command: cli.command.name().to_string(),
        seed: cli.common.seed,
        params: outcome.params,
        outputs: outcome.outputs,
        wall_millis: started.elapsed().as_millis() as u64,
    };
    let stem = cli.stem();
    match write_outputs(&cli.common.out, &stem, &record, outcome.table.as_ref()) {
        Ok((json, csv)) => {
            let mut wrote = json.display().to_string();
            if let Some(csv) = csv {
                wrote.push_str(&format!(", {}", csv.display()));
            }
            println!("{}: {} [{}]", record.command, outcome.summary, wrote);
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    }
    if outcome.budget_exhausted {
        ExitCode::from(EXIT_CAPACITY)
    } else {
        ExitCode::SUCCESS
    }
}
