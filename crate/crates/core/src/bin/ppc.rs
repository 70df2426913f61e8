use std::process::ExitCode;

use clap::Parser;
use torus_ppc::cli::{run, Cli};
use torus_ppc::par;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(par::with_threads(par::threads_from_env(), || run(&cli)))
}
