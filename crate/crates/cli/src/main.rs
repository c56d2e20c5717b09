mod cli;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use commands::Failure;

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Scan(a) => commands::scan(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Sample(a) => commands::sample(a),
        Command::Curves(a) => commands::curves(a),
        Command::EvalRoi(a) => commands::eval_roi(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::Usage(format!("cannot start {n} worker threads: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("active-sem: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
