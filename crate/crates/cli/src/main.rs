use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use toda_geometry_cli::{run, CliError, RunConfig, RunOptions};

/// Sweeps a grid of a Toda surface and writes fundamental forms, immersion
/// coordinates and a verification report.
#[derive(Debug, Parser)]
#[command(name = "toda-geom", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Replace a config value, e.g. `--override model.c=-1`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
    /// Run the checks and write only the report.
    #[arg(long)]
    check_only: bool,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    RunConfig::parse(&text, &args.overrides)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|cfg| {
        run(
            &cfg,
            RunOptions {
                check_only: args.check_only,
            },
        )
    });
    match outcome {
        Err(e) => {
            eprintln!("toda-geom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Ok(out) => {
            let r = &out.report;
            if !args.quiet || !r.pass {
                for c in r.checks.iter().filter(|c| c.enabled) {
                    let verdict = if c.pass == Some(true) { "pass" } else { "FAIL" };
                    let v = match c.max_residual.as_f64() {
                        Some(v) => format!("{v:.3e}"),
                        None => "quarantined".into(),
                    };
                    println!("{:<22} {verdict}  max {v}  tol {:.1e}", c.name, c.tolerance);
                }
                println!(
                    "quarantined {}/{} points; {} artifact(s) written; overall {}",
                    r.quarantine.count,
                    r.grid.points,
                    out.written.len(),
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
            ExitCode::from(out.exit_code() as u8)
        }
    }
}
