use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod config;
mod error;

use args::{Cli, Command};
use config::Config;
use error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Vec<u8>, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Maxflow(a) => commands::maxflow(a, &config.maxflow),
        Command::Dimension(a) => commands::dimension(a, &config.dimension),
        Command::Blocking(a) => commands::blocking(a, &config.blocking),
        Command::Simulate(a) => commands::simulate(a, &config.blocking, &config.simulate),
        Command::Sweep(a) => commands::sweep(a, &config.sweep),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(bytes) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
