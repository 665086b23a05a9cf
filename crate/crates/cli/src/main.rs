mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use trieshape::Error;

use args::{config_flags, find_config, merge_config, Cli};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) => 4,
        e if e.is_numeric() => 3,
        _ => 2,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match find_config(&argv) {
        Some(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            };
            match config_flags(&text) {
                Ok(flags) => merge_config(argv, flags),
                Err(msg) => {
                    eprintln!("error: {}: {msg}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
        None => argv,
    };

    let mut cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let text = match commands::execute(&mut cli.command) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    let written = match &cli.command.output().out {
        Some(path) => output::write_atomic(path, text.as_bytes()),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(Error::from),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
