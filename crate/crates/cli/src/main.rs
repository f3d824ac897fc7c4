mod args;
mod commands;
mod error;
mod input;
mod output;
mod simulate;

use std::process::ExitCode;

use clap::Parser;

use args::{Command, RunConfig};
use error::CliResult;

fn run(cfg: &RunConfig) -> CliResult<()> {
    let bytes = match &cfg.command {
        Command::Combine(data) => commands::combine(data)?.render(cfg.format)?,
        Command::Calibrate { r, alpha, max_m, trials, seed } => {
            commands::calibrate(*r, *alpha, *max_m, *trials, *seed)?
        }
        Command::Adjust { data, set } => commands::adjust(data, set.as_deref())?.render(cfg.format)?,
        Command::Coma { data, set } => commands::coma(data, &set.set)?.render(cfg.format)?,
        Command::Bound { data, set } => commands::bound(data, &set.set)?.render(cfg.format)?,
        Command::Select { data, mode } => commands::select(data, mode)?.render(cfg.format)?,
        Command::Simulate(sim) => simulate::simulate(sim)?.render(cfg.format)?,
    };
    output::emit(&bytes, cfg.output.as_deref())
}

fn main() -> ExitCode {
    let cfg = match RunConfig::try_parse() {
        Ok(cfg) => cfg,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let head: Vec<&str> =
                text.lines().map(str::trim).take_while(|l| !l.is_empty() && !l.starts_with("Usage:")).collect();
            eprintln!("{}", head.join(" "));
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
