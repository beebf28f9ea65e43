use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use switchfn_cli::args::Cli;
use switchfn_cli::{execute, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match execute(&cli) {
        Ok(output) => output,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Failed(err)) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(1);
        }
    };
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    let body = output.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &body).map_err(|e| format!("writing {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| format!("writing stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if output.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
