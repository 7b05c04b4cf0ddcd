use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use bethe_tj_cli::{run, Mode, ParamFile, RunConfig};
use clap::Parser;

/// Exact-solution workbench for the open supersymmetric t-J chain.
#[derive(Debug, Parser)]
#[command(name = "bethe-tj", version)]
struct Args {
    /// JSON parameter file.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "full")]
    mode: Mode,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// RNG seed for the multi-start search.
    #[arg(long)]
    seed: Option<u64>,
    /// Bethe-equation residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Do not seed the search with published roots.
    #[arg(long)]
    no_table_seeds: bool,
}

fn threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("BETHE_TJ_THREADS") {
        let n: usize = v.parse().with_context(|| format!("BETHE_TJ_THREADS = {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = threads().and_then(|_| {
        let file = ParamFile::load(&args.config)?;
        let cfg = RunConfig::new(file, args.mode, args.out.clone(), args.seed, args.tol, !args.no_table_seeds)?;
        run(&cfg)
    });
    match result {
        Ok(summary) => {
            for g in &summary.gates {
                println!("{} {}: {}", if g.pass { "PASS" } else { "FAIL" }, g.name, g.detail);
            }
            if let Some(c) = summary.coverage {
                println!("coverage {c:.4}");
            }
            if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
