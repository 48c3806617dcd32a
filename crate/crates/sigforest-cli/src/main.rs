mod commands;
mod manifest;
mod method;

use clap::Parser;

use commands::Cli;

fn main() -> std::process::ExitCode {
    commands::init_thread_pool();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(err.exit_code())
        }
    }
}
