use std::process::ExitCode;

use bergman_dbar_cli::args::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match bergman_dbar_cli::run(&cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dbar: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
