mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};

fn dispatch(cli: &Cli) -> hgbc::Result<commands::Failures> {
    let common = match &cli.command {
        Command::Mesh(a) | Command::Gbc(a) => a,
        Command::Locality(a) => &a.common,
        Command::Poisson(a) => &a.common,
    };
    let cfg = RunConfig::resolve(common)?;
    let run = || match &cli.command {
        Command::Mesh(_) => commands::mesh(&cfg),
        Command::Gbc(_) => commands::gbc(&cfg),
        Command::Locality(a) => commands::locality(&cfg, a),
        Command::Poisson(a) => commands::poisson(&cfg, a),
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(failures) if failures.is_empty() => {
            println!("all checks passed");
            ExitCode::SUCCESS
        }
        Ok(failures) => {
            for f in &failures {
                eprintln!("FAILED: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
