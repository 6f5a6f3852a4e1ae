use std::io::Write;
use std::process::ExitCode;

use canoma_cli::{run, Cli, CliError};
use clap::Parser;

const VALIDATION_FAILED: u8 = 2;

fn emit(cli: &Cli, csv: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, csv)?,
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("canoma: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(&cli, &report.csv) {
        eprintln!("canoma: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    for line in &report.notes {
        eprintln!("{line}");
    }
    if report.failed {
        ExitCode::from(VALIDATION_FAILED)
    } else {
        ExitCode::SUCCESS
    }
}
