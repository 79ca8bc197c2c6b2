//! `droplet`: experiment runner for the disordered hard-core chain.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! certified inequality fails.

mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use config::{Overrides, Plan};

#[derive(Debug, Parser)]
#[command(
    name = "droplet",
    version,
    about = "Localization laboratory for the disordered droplet chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = execute(&cli);
    match &outcome {
        Ok(0) => {}
        Ok(v) => eprintln!("error: {v} certified inequality check(s) failed"),
        Err(e) => eprintln!("error: {e:#}"),
    }
    ExitCode::from(exit_code(&outcome))
}

fn exit_code(outcome: &anyhow::Result<usize>) -> u8 {
    match outcome {
        Ok(0) => 0,
        Ok(_) => 2,
        Err(e) => match e.downcast_ref::<droplet_core::Error>() {
            Some(droplet_core::Error::Violation(_)) => 2,
            _ => 1,
        },
    }
}

fn execute(cli: &Cli) -> anyhow::Result<usize> {
    let plan = Plan::resolve(&cli.overrides)?;
    let started = chrono::Utc::now();
    let report = commands::run(cli.command, &plan)?;
    for line in &report.lines {
        println!("{line}");
    }
    manifest::write_outputs(
        &plan.out_dir,
        cli.command.name(),
        &plan,
        started,
        &report.files,
    )?;
    println!(
        "wrote {} file(s) and manifest.json to {}",
        report.files.len(),
        plan.out_dir.display()
    );
    Ok(report.violations)
}
