mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::{execute, Output};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli, &argv) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(1)
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Returns the check failure message, if the command reported one.
fn run(cli: &Cli, argv: &[String]) -> Result<Option<String>> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("cannot start the thread pool")?;

    if let Command::Replay { manifest } = &cli.command {
        let summary = pool.install(|| manifest::replay(manifest))?;
        print!("{summary}");
        return Ok(None);
    }

    let out = pool.install(|| execute(&cli.command))?;
    emit(cli, argv, &out)?;
    Ok(out.failure)
}

fn emit(cli: &Cli, argv: &[String], out: &Output) -> Result<()> {
    print!("{}", out.stdout);
    match &cli.out_dir {
        Some(dir) => manifest::write_run(dir, argv, out),
        None => {
            for (name, bytes) in &out.files {
                println!("--- {name}");
                print!("{}", String::from_utf8_lossy(bytes));
            }
            Ok(())
        }
    }
}
