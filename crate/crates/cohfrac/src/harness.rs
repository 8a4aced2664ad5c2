//! Experiment driver: dispatches a parsed configuration to the patch rigs
//! or the solver and writes `curve.csv`, `snapshots/NNNN.txt` and
//! `summary.txt` into the output directory.

use crate::config::{config_digest, Experiment, RunConfig};
use crate::mesh::tessellate;
use crate::output::{
    write_compression_csv, write_patch_csv, write_snapshot, RunSummary,
};
use crate::patch::{run_shear_patch, run_tension_patch, CurveRecord, PatchError};
use crate::solver::{run_compression, SnapshotRow, SolverError};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<PatchError> for RunError {
    fn from(e: PatchError) -> Self {
        match e {
            PatchError::Constitutive(inner) => RunError::Numerical(inner.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

impl From<SolverError> for RunError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BadConfig(_) | SolverError::InvertedElement(_) => {
                RunError::Config(e.to_string())
            }
            other => RunError::Numerical(other.to_string()),
        }
    }
}

impl From<crate::mesh::MeshError> for RunError {
    fn from(e: crate::mesh::MeshError) -> Self {
        RunError::Config(e.to_string())
    }
}

fn patch_snapshot_rows(rec: &CurveRecord<f64>) -> Vec<SnapshotRow<f64>> {
    let last = rec.samples.last().expect("record is never empty");
    vec![SnapshotRow {
        id: 0,
        x: 0.0,
        y: 0.0,
        damage: last.damage,
        u_ieff: last.u_ieff,
        broken: last.strength <= 0.0,
    }]
}

fn write_snapshot_file(
    dir: &Path,
    index: usize,
    step: usize,
    rows: &[SnapshotRow<f64>],
) -> std::io::Result<()> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir)?;
    let mut buf = Vec::new();
    write_snapshot(step, rows, &mut buf)?;
    fs::write(snap_dir.join(format!("{index:04}.txt")), buf)
}

/// Runs one experiment and writes all output files. Returns the summary
/// that was written to `summary.txt`.
pub fn run(cfg: &RunConfig, out_override: Option<&Path>) -> Result<RunSummary, RunError> {
    let started = Instant::now();
    let digest = config_digest(cfg);
    let out_dir: PathBuf = out_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&cfg.output.directory));
    fs::create_dir_all(&out_dir)?;

    let summary = match cfg.experiment {
        Experiment::Tension | Experiment::Shear => {
            let sched = cfg
                .schedule
                .ok_or_else(|| RunError::Config("patch experiment without schedule".into()))?;
            let rec = if cfg.experiment == Experiment::Tension {
                run_tension_patch(&cfg.material, &sched)?
            } else {
                run_shear_patch(&cfg.material, &sched)?
            };

            let mut buf = Vec::new();
            write_patch_csv(&rec, &mut buf)?;
            fs::write(out_dir.join("curve.csv"), buf)?;
            write_snapshot_file(&out_dir, 0, sched.steps, &patch_snapshot_rows(&rec))?;

            let peak = rec.peak();
            let broken = usize::from(rec.samples.last().unwrap().strength <= 0.0);
            RunSummary {
                experiment: cfg.experiment.name(),
                peak_stress: peak.traction,
                peak_abscissa: peak.displacement,
                abscissa_label: if cfg.experiment == Experiment::Tension {
                    "peak_opening_m"
                } else {
                    "peak_slip_m"
                },
                dissipated: rec.total_dissipated(),
                dissipated_label: "dissipated_energy_J_per_m2",
                broken_interfaces: broken,
                wall_clock_s: started.elapsed().as_secs_f64(),
                config_digest: digest,
            }
        }
        Experiment::Compression | Experiment::Custom => {
            let specimen = cfg
                .specimen
                .ok_or_else(|| RunError::Config("solver experiment without specimen".into()))?;
            let solver = cfg
                .solver
                .ok_or_else(|| RunError::Config("solver experiment without solver block".into()))?;
            let mesh = tessellate(&specimen)?;
            let rec = run_compression(
                &mesh,
                &cfg.material,
                &solver,
                cfg.output.sample_interval,
                cfg.output.snapshot_interval,
            )?;

            let mut buf = Vec::new();
            write_compression_csv(&rec, &mut buf)?;
            fs::write(out_dir.join("curve.csv"), buf)?;
            for (i, (step, rows)) in rec.snapshots.iter().enumerate() {
                write_snapshot_file(&out_dir, i, *step, rows)?;
            }

            let broken = rec
                .snapshots
                .last()
                .map(|(_, rows)| rows.iter().filter(|r| r.broken).count())
                .unwrap_or(0);
            RunSummary {
                experiment: cfg.experiment.name(),
                peak_stress: rec.peak_stress,
                peak_abscissa: rec.peak_strain,
                abscissa_label: "peak_strain",
                dissipated: rec.dissipated,
                dissipated_label: "dissipated_energy_J",
                broken_interfaces: broken,
                wall_clock_s: started.elapsed().as_secs_f64(),
                config_digest: digest,
            }
        }
    };

    fs::write(out_dir.join("summary.txt"), summary.to_text())?;
    Ok(summary)
}
