use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use frontidx::cli::{apply_env_overrides, parse_config, run_scenario, write_outputs, ScenarioConfig};

#[derive(Parser)]
#[command(name = "frontidx", version, about = "Singularities of fronts and Morin maps, and their index formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario configs; several configs run concurrently.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Output directory (default: `out=` from the config, else `frontidx-out`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit SVG plots.
        #[arg(long)]
        plots: bool,
        /// Cross-check degrees against signed preimage counts.
        #[arg(long)]
        oracle: bool,
    },
}

fn load(path: &Path, plots: bool, oracle: bool) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut cfg = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    apply_env_overrides(&mut cfg, |k| std::env::var(k).ok()).map_err(|e| format!("{}: {e}", path.display()))?;
    cfg.plots |= plots;
    cfg.oracle |= oracle;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { configs, out, plots, oracle } = cli.command;
    let mut loaded = Vec::new();
    for path in &configs {
        match load(path, plots, oracle) {
            Ok(c) => loaded.push((path.clone(), c)),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let many = loaded.len() > 1;
    let codes: Vec<u8> = loaded
        .par_iter()
        .map(|(path, cfg)| {
            let mut dir = out
                .clone()
                .or_else(|| cfg.out.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("frontidx-out"));
            if many {
                dir = dir.join(path.file_stem().unwrap_or_default());
            }
            let outcome = run_scenario(cfg);
            let r = &outcome.report;
            if let Err(e) = write_outputs(&outcome, &dir) {
                eprintln!("error: {}: {e}", dir.display());
                return 2;
            }
            for f in &r.formulas {
                println!(
                    "{}: {:?} {} lhs={} rhs={} residual={}",
                    path.display(),
                    f.theorem,
                    f.subject,
                    f.lhs,
                    f.rhs,
                    f.residual
                );
            }
            for e in &r.errors {
                println!("{}: {} [{}] {}", path.display(), e.kind, e.stage, e.message);
            }
            println!(
                "{}: {} ({:.2} s) -> {}",
                path.display(),
                if r.passed { "PASS" } else { "FAIL" },
                r.timing.total_seconds,
                dir.join("report.json").display()
            );
            r.exit_code() as u8
        })
        .collect();
    ExitCode::from(codes.into_iter().max().unwrap_or(0))
}
