use std::process::ExitCode;

use clap::Parser;
use tumorseg_cli::args::{execute, Cli};

fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}
