//! `cohfrac` command line: run bundled or custom experiments, compare
//! curve files, and dump meshes.
//!
//! Exit codes: 0 success, 1 failed comparison, 2 configuration error,
//! 3 numerical failure.

use clap::{Parser, Subcommand};
use cohfrac::config::{parse_config, parse_config_str, preset_names, preset_source, RunConfig};
use cohfrac::harness::{run, RunError};
use cohfrac::mesh::tessellate;
use cohfrac::output::{compare_curve, read_curve};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cohfrac",
    about = "Cohesive-interface distinct-element test bench",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file or a bundled preset.
    Run {
        /// Path to a run configuration file.
        config: Option<PathBuf>,
        /// Name of a bundled preset (see `--preset help`).
        #[arg(long)]
        preset: Option<String>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two curve CSV files column by column.
    Compare {
        reference: PathBuf,
        other: PathBuf,
        /// Allowed deviation relative to each reference column's maximum
        /// magnitude.
        #[arg(long)]
        tol: f64,
    },
    /// Tessellate the specimen of a config and print the mesh listing.
    MeshDump {
        config: PathBuf,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(config: Option<&PathBuf>, preset: Option<&str>) -> Result<RunConfig, String> {
    match (config, preset) {
        (Some(path), None) => parse_config(path).map_err(|e| e.to_string()),
        (None, Some(name)) => {
            if name == "help" {
                return Err(format!("available presets: {}", preset_names().join(", ")));
            }
            let source = preset_source(name).ok_or_else(|| {
                format!(
                    "unknown preset `{name}`; available: {}",
                    preset_names().join(", ")
                )
            })?;
            parse_config_str(source).map_err(|e| e.to_string())
        }
        (Some(_), Some(_)) => Err("give either a config path or --preset, not both".into()),
        (None, None) => Err("a config path or --preset is required".into()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COHFRAC_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, preset, out } => {
            let cfg = match load_config(config.as_ref(), preset.as_deref()) {
                Ok(cfg) => cfg,
                Err(msg) => {
                    eprintln!("config error: {msg}");
                    return ExitCode::from(2);
                }
            };
            match run(&cfg, out.as_deref()) {
                Ok(summary) => {
                    print!("{}", summary.to_text());
                    ExitCode::SUCCESS
                }
                Err(RunError::Config(msg)) => {
                    eprintln!("config error: {msg}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Compare { reference, other, tol } => {
            let load = |p: &PathBuf| -> Result<_, String> {
                let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
                read_curve(&text).map_err(|e| e.to_string())
            };
            let (a, b) = match (load(&reference), load(&other)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    eprintln!("compare error: {e}");
                    return ExitCode::from(2);
                }
            };
            match compare_curve(&a, &b, tol) {
                Ok(report) => {
                    print!("{}", report.to_text());
                    if report.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("compare error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::MeshDump { config, out } => {
            let cfg = match parse_config(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            };
            let Some(spec) = cfg.specimen else {
                eprintln!("config error: experiment `{}` has no specimen", cfg.experiment.name());
                return ExitCode::from(2);
            };
            let mesh = match tessellate(&spec) {
                Ok(mesh) => mesh,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            };
            let result = match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    mesh.write_listing(&mut buf)
                        .and_then(|()| std::fs::write(path, buf))
                }
                None => {
                    let stdout = std::io::stdout();
                    mesh.write_listing(&mut stdout.lock())
                }
            };
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("io error: {e}");
                    ExitCode::from(3)
                }
            }
        }
    }
}
