use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use igk_cli::{execute, Cli, EXIT_USAGE, TOL_PROFILE_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let env_profile = std::env::var(TOL_PROFILE_ENV).ok();
    let outcome = match execute(&cli, env_profile.as_deref()) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("igk: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    let written = match &cli.output.out {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(outcome.body.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("igk: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    ExitCode::from(outcome.code as u8)
}
