use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = sitecat::cli::Cli::parse();
    match sitecat::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
