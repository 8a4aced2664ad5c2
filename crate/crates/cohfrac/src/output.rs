//! Curve CSV schemas, crack snapshots, run summaries and curve comparison.
//!
//! Column orders are fixed and documented here; numeric cells use the
//! shortest round-trip scientific notation, so identical runs produce
//! byte-identical files.

use crate::patch::{CurveRecord, LoadMode};
use crate::real::Real;
use crate::solver::{CompressionRecord, SnapshotRow};
use std::fmt::Write as _;
use std::io::{self, Write};
use thiserror::Error;

/// Column header of a tension patch curve.
pub const TENSION_HEADER: &str =
    "step,time_s,opening_m,sigma_n_Pa,u_ieff_m,damage,alpha,k_ns_Pa_per_m,sigma_t_Pa";
/// Column header of a shear patch curve.
pub const SHEAR_HEADER: &str =
    "step,time_s,slip_m,tau_Pa,u_ieff_m,damage,alpha,k_ss_Pa_per_m,c_Pa";
/// Column header of a compression curve.
pub const COMPRESSION_HEADER: &str =
    "step,time_s,strain,stress_Pa,yielded_count,broken_count,kinetic_energy_J,strain_energy_J";

fn num<F: Real>(v: F) -> String {
    format!("{:e}", v.as_f64())
}

/// Writes a patch curve in its fixed schema. Patch rigs have no physical
/// clock; `time_s` carries the step index as pseudo-time.
pub fn write_patch_csv<F: Real, W: Write>(rec: &CurveRecord<F>, w: &mut W) -> io::Result<()> {
    let header = match rec.mode {
        LoadMode::Tension => TENSION_HEADER,
        LoadMode::Shear => SHEAR_HEADER,
    };
    writeln!(w, "{header}")?;
    for s in &rec.samples {
        writeln!(
            w,
            "{},{:e},{},{},{},{},{},{},{}",
            s.step,
            s.step as f64,
            num(s.displacement),
            num(s.traction),
            num(s.u_ieff),
            num(s.damage),
            num(s.alpha),
            num(s.stiffness),
            num(s.strength),
        )?;
    }
    Ok(())
}

/// Writes a compression curve in its fixed schema.
pub fn write_compression_csv<F: Real, W: Write>(
    rec: &CompressionRecord<F>,
    w: &mut W,
) -> io::Result<()> {
    writeln!(w, "{COMPRESSION_HEADER}")?;
    for s in &rec.samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            s.step,
            num(s.time),
            num(s.strain),
            num(s.stress),
            s.yielded,
            s.broken,
            num(s.kinetic_energy),
            num(s.strain_energy),
        )?;
    }
    Ok(())
}

/// Writes one crack snapshot: a columnar text file with one row per
/// interface.
pub fn write_snapshot<F: Real, W: Write>(
    step: usize,
    rows: &[SnapshotRow<F>],
    w: &mut W,
) -> io::Result<()> {
    writeln!(w, "# crack snapshot at step {step}")?;
    writeln!(w, "# id x_m y_m damage u_ieff_m broken")?;
    for r in rows {
        writeln!(
            w,
            "{} {} {} {} {} {}",
            r.id,
            num(r.x),
            num(r.y),
            num(r.damage),
            num(r.u_ieff),
            u8::from(r.broken),
        )?;
    }
    Ok(())
}

/// Machine-readable result summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub experiment: &'static str,
    /// Peak driven stress (Pa).
    pub peak_stress: f64,
    /// Abscissa of the peak: opening/slip (m) for patch runs, axial strain
    /// for solver runs.
    pub peak_abscissa: f64,
    /// What `peak_abscissa` measures.
    pub abscissa_label: &'static str,
    /// Dissipated energy: J/m² for patch runs, J (per unit thickness) for
    /// solver runs.
    pub dissipated: f64,
    pub dissipated_label: &'static str,
    pub broken_interfaces: usize,
    pub wall_clock_s: f64,
    pub config_digest: String,
}

impl RunSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "peak_stress_Pa = {:e}", self.peak_stress);
        let _ = writeln!(s, "{} = {:e}", self.abscissa_label, self.peak_abscissa);
        let _ = writeln!(s, "{} = {:e}", self.dissipated_label, self.dissipated);
        let _ = writeln!(s, "broken_interfaces = {}", self.broken_interfaces);
        let _ = writeln!(s, "wall_clock_s = {:e}", self.wall_clock_s);
        let _ = writeln!(s, "config_digest = {}", self.config_digest);
        s
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("file has no header row")]
    Empty,
    #[error("schema mismatch: left columns `{left}` vs right columns `{right}`")]
    SchemaMismatch { left: String, right: String },
    #[error("row count mismatch: {left} vs {right}")]
    RowCountMismatch { left: usize, right: usize },
    #[error("line {line}: cell `{cell}` is not numeric")]
    BadCell { line: usize, cell: String },
}

/// A parsed CSV curve: header names plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Parses a curve CSV produced by this crate (header row plus numeric
/// cells).
pub fn read_curve(text: &str) -> Result<Curve, CompareError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(CompareError::Empty)?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(columns.len());
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| CompareError::BadCell {
                line: idx + 2,
                cell: cell.to_string(),
            })?;
            row.push(v);
        }
        if row.len() != columns.len() {
            return Err(CompareError::BadCell {
                line: idx + 2,
                cell: "(row length)".to_string(),
            });
        }
        rows.push(row);
    }
    Ok(Curve { columns, rows })
}

/// Per-column deviation report of a curve comparison.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub columns: Vec<String>,
    /// Maximum absolute deviation per column.
    pub max_abs: Vec<f64>,
    /// `max_abs` scaled by the reference column's maximum magnitude
    /// (deviation is absolute when the reference column is all zero).
    pub max_rel: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "column,max_abs_deviation,relative_deviation");
        for i in 0..self.columns.len() {
            let _ = writeln!(
                s,
                "{},{:e},{:e}",
                self.columns[i], self.max_abs[i], self.max_rel[i]
            );
        }
        let _ = writeln!(
            s,
            "result = {} (tolerance {:e})",
            if self.pass { "pass" } else { "fail" },
            self.tolerance
        );
        s
    }
}

/// Compares two curves column by column. The tolerance is relative to each
/// reference column's maximum magnitude, so columns of different physical
/// scale are judged consistently. Schemas (names and order) must match.
pub fn compare_curve(reference: &Curve, other: &Curve, tol: f64) -> Result<CompareReport, CompareError> {
    if reference.columns != other.columns {
        return Err(CompareError::SchemaMismatch {
            left: reference.columns.join(","),
            right: other.columns.join(","),
        });
    }
    if reference.rows.len() != other.rows.len() {
        return Err(CompareError::RowCountMismatch {
            left: reference.rows.len(),
            right: other.rows.len(),
        });
    }
    let ncol = reference.columns.len();
    let mut max_abs = vec![0.0f64; ncol];
    let mut scale = vec![0.0f64; ncol];
    for (a, b) in reference.rows.iter().zip(&other.rows) {
        for c in 0..ncol {
            max_abs[c] = max_abs[c].max((a[c] - b[c]).abs());
            scale[c] = scale[c].max(a[c].abs());
        }
    }
    let max_rel: Vec<f64> = max_abs
        .iter()
        .zip(&scale)
        .map(|(d, s)| if *s > 0.0 { d / s } else { *d })
        .collect();
    let pass = max_rel.iter().all(|r| *r <= tol);
    Ok(CompareReport {
        columns: reference.columns.clone(),
        max_abs,
        max_rel,
        tolerance: tol,
        pass,
    })
}
