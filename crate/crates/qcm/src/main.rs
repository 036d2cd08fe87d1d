use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qcm::cli::{Cli, Format, RunConfig};
use qcm::commands;
use qcm::CliError;

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let (kind, raw) = Cli::parse().command.split();
    let result = RunConfig::resolve(kind, raw).and_then(|cfg| {
        let outcome = commands::run(&cfg)?;
        let text = match cfg.format {
            Format::Csv => outcome.table.to_csv(),
            Format::Json => outcome.table.to_json(),
        };
        write_output(&cfg, &text)?;
        Ok(outcome.breach)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(breach)) => {
            eprintln!("qcm: tolerance breach: {breach}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qcm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
