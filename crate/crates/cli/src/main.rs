mod args;
mod commands;
mod input;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde_json::json;

use args::Cli;

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("FOLLMER_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .trim()
        .parse()
        .with_context(|| format!("FOLLMER_THREADS='{v}' is not a count"))?;
    if k == 0 {
        bail!("FOLLMER_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    configure_threads()?;
    if let Some(dir) = &cli.common.out {
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    let name = commands::name(&cli.command);
    let out = commands::run(&cli.command, &cli.common)?;
    let pass = out.checks.iter().all(|c| c.pass);
    let summary = json!({
        "command": name,
        "seed": cli.common.seed,
        "report": out.report,
        "checks": out.checks,
        "pass": pass,
    });
    let text = serde_json::to_string_pretty(&summary)?;
    if let Some(dir) = &cli.common.out {
        std::fs::write(dir.join(format!("{name}.csv")), &out.csv)?;
        std::fs::write(dir.join(format!("{name}.json")), format!("{text}\n"))?;
    }
    println!("{text}");
    for c in out.checks.iter().filter(|c| !c.pass) {
        eprintln!("check {} failed: {}", c.name, c.detail);
    }
    Ok(if cli.common.assert && !pass {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
