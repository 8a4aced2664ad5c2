//! Run configuration: a flat, sectioned key-value file with mandatory unit
//! suffixes on every dimensioned quantity.
//!
//! ```text
//! experiment = tension
//!
//! [material]
//! sigma_t0 = 2.8 MPa
//! ...
//! ```
//!
//! Unknown keys are rejected with a line number and the nearest valid key;
//! all values are normalized to strict SI at parse time.

use crate::material::MaterialParams;
use crate::mesh::{Pattern, SpecimenSpec};
use crate::patch::{LoadMode, LoadSchedule};
use crate::solver::SolverConfig;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Tension,
    Shear,
    Compression,
    /// General platen-loading run on an arbitrary specimen; handled by the
    /// same machinery as `Compression`.
    Custom,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Tension => "tension",
            Experiment::Shear => "shear",
            Experiment::Compression => "compression",
            Experiment::Custom => "custom",
        }
    }
}

/// Output controls.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// Output directory; created on demand.
    pub directory: String,
    /// Record a curve row every this many steps (compression runs).
    pub sample_interval: usize,
    /// Write a crack snapshot every this many steps (0 disables periodic
    /// snapshots; a final one is always written).
    pub snapshot_interval: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".to_string(),
            sample_interval: 1000,
            snapshot_interval: 0,
        }
    }
}

/// Fully parsed, SI-normalized run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub material: MaterialParams<f64>,
    /// Present for the patch experiments.
    pub schedule: Option<LoadSchedule<f64>>,
    /// Present for solver experiments.
    pub specimen: Option<SpecimenSpec<f64>>,
    pub solver: Option<SolverConfig<f64>>,
    pub output: OutputConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`{}", suggestion_text(.suggestion))]
    UnknownKey {
        line: usize,
        key: String,
        suggestion: Option<String>,
    },
    #[error("line {line}: unknown section `[{section}]`")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: malformed line (expected `key = value`)")]
    Malformed { line: usize },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("line {line}: `{key}` needs a unit suffix ({expected})")]
    MissingUnit {
        line: usize,
        key: String,
        expected: &'static str,
    },
    #[error("line {line}: unknown unit `{unit}` for `{key}` (expected {expected})")]
    BadUnit {
        line: usize,
        key: String,
        unit: String,
        expected: &'static str,
    },
    #[error("missing required key `{key}` in section [{section}]")]
    MissingKey {
        section: &'static str,
        key: &'static str,
    },
    #[error("missing `experiment` key")]
    MissingExperiment,
    #[error("experiment `{experiment}` requires section [{section}]")]
    MissingSection {
        experiment: &'static str,
        section: &'static str,
    },
    #[error("duplicate key `{key}` at line {line}")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid material: {0}")]
    Material(#[from] crate::material::MaterialError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn suggestion_text(s: &Option<String>) -> String {
    match s {
        Some(k) => format!(", did you mean `{k}`?"),
        None => String::new(),
    }
}

/// Dimension of a config value, defining the accepted unit suffixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Density,
    Stress,
    StiffnessPerLength,
    Length,
    Angle,
    Velocity,
    Dimensionless,
    Count,
    Text,
}

impl Dim {
    fn expected(&self) -> &'static str {
        match self {
            Dim::Density => "kg/m3",
            Dim::Stress => "Pa, kPa, MPa or GPa",
            Dim::StiffnessPerLength => "Pa/m, MPa/m, GPa/m, MPa/mm or GPa/mm",
            Dim::Length => "m, cm, mm or um",
            Dim::Angle => "rad or deg",
            Dim::Velocity => "m/s, mm/s or um/s",
            Dim::Dimensionless => "a bare number",
            Dim::Count => "a bare non-negative integer",
            Dim::Text => "text",
        }
    }

    fn factor(&self, unit: &str) -> Option<f64> {
        let table: &[(&str, f64)] = match self {
            Dim::Density => &[("kg/m3", 1.0)],
            Dim::Stress => &[("Pa", 1.0), ("kPa", 1e3), ("MPa", 1e6), ("GPa", 1e9)],
            Dim::StiffnessPerLength => &[
                ("Pa/m", 1.0),
                ("kPa/m", 1e3),
                ("MPa/m", 1e6),
                ("GPa/m", 1e9),
                ("MPa/mm", 1e9),
                ("GPa/mm", 1e12),
            ],
            Dim::Length => &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6)],
            Dim::Angle => &[("rad", 1.0), ("deg", core::f64::consts::PI / 180.0)],
            Dim::Velocity => &[("m/s", 1.0), ("mm/s", 1e-3), ("um/s", 1e-6)],
            Dim::Dimensionless | Dim::Count | Dim::Text => &[],
        };
        table.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)
    }
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    dim: Dim,
}

const KEYS: &[KeySpec] = &[
    KeySpec { section: "", key: "experiment", dim: Dim::Text },
    KeySpec { section: "material", key: "rho", dim: Dim::Density },
    KeySpec { section: "material", key: "youngs", dim: Dim::Stress },
    KeySpec { section: "material", key: "poisson", dim: Dim::Dimensionless },
    KeySpec { section: "material", key: "friction_angle", dim: Dim::Angle },
    KeySpec { section: "material", key: "dilation_angle", dim: Dim::Angle },
    KeySpec { section: "material", key: "kn0", dim: Dim::StiffnessPerLength },
    KeySpec { section: "material", key: "ks0", dim: Dim::StiffnessPerLength },
    KeySpec { section: "material", key: "sigma_t0", dim: Dim::Stress },
    KeySpec { section: "material", key: "c0", dim: Dim::Stress },
    KeySpec { section: "material", key: "w_sigma", dim: Dim::Length },
    KeySpec { section: "material", key: "w_c", dim: Dim::Length },
    KeySpec { section: "material", key: "eta", dim: Dim::Dimensionless },
    KeySpec { section: "schedule", key: "steps", dim: Dim::Count },
    KeySpec { section: "schedule", key: "displacement_increment", dim: Dim::Length },
    KeySpec { section: "schedule", key: "normal_preload", dim: Dim::Stress },
    KeySpec { section: "schedule", key: "substeps", dim: Dim::Count },
    KeySpec { section: "specimen", key: "width", dim: Dim::Length },
    KeySpec { section: "specimen", key: "height", dim: Dim::Length },
    KeySpec { section: "specimen", key: "particle_size", dim: Dim::Length },
    KeySpec { section: "specimen", key: "pattern", dim: Dim::Text },
    KeySpec { section: "specimen", key: "voronoi_seed", dim: Dim::Count },
    KeySpec { section: "solver", key: "damping", dim: Dim::Dimensionless },
    KeySpec { section: "solver", key: "timestep_safety", dim: Dim::Dimensionless },
    KeySpec { section: "solver", key: "loading_velocity", dim: Dim::Velocity },
    KeySpec { section: "solver", key: "max_steps", dim: Dim::Count },
    KeySpec { section: "solver", key: "quasi_static_tolerance", dim: Dim::Dimensionless },
    KeySpec { section: "output", key: "directory", dim: Dim::Text },
    KeySpec { section: "output", key: "sample_interval", dim: Dim::Count },
    KeySpec { section: "output", key: "snapshot_interval", dim: Dim::Count },
];

const SECTIONS: &[&str] = &["material", "schedule", "specimen", "solver", "output"];

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn nearest_key(section: &str, key: &str) -> Option<String> {
    KEYS.iter()
        .filter(|k| k.section == section)
        .map(|k| (edit_distance(key, k.key), k.key))
        .min()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, k)| k.to_string())
}

#[derive(Debug, Clone)]
struct RawValue {
    line: usize,
    value: String,
}

/// Parses config text into a validated, SI-normalized [`RunConfig`].
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut section = String::new();
    let mut values: Vec<(String, String, RawValue)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(ConfigError::UnknownSection {
                    line: line_no,
                    section: name,
                });
            }
            section = name;
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed { line: line_no });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let known = KEYS
            .iter()
            .any(|k| k.section == section && k.key == key);
        if !known {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                suggestion: nearest_key(&section, &key),
                key,
            });
        }
        if values
            .iter()
            .any(|(s, k, _)| *s == section && *k == key)
        {
            return Err(ConfigError::DuplicateKey { line: line_no, key });
        }
        values.push((
            section.clone(),
            key,
            RawValue {
                line: line_no,
                value,
            },
        ));
    }

    let lookup = |section: &str, key: &str| -> Option<&RawValue> {
        values
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v)
    };

    let spec_of = |section: &str, key: &str| -> &'static KeySpec {
        KEYS.iter()
            .find(|k| k.section == section && k.key == key)
            .expect("key registry covers all lookups")
    };

    let number = |section: &'static str, key: &'static str| -> Result<Option<f64>, ConfigError> {
        let Some(raw) = lookup(section, key) else {
            return Ok(None);
        };
        let spec = spec_of(section, key);
        let mut parts = raw.value.split_whitespace();
        let num_text = parts.next().ok_or(ConfigError::Malformed { line: raw.line })?;
        let value: f64 = num_text.parse().map_err(|e| ConfigError::BadValue {
            line: raw.line,
            key: key.to_string(),
            reason: format!("{e}"),
        })?;
        let unit = parts.next();
        if parts.next().is_some() {
            return Err(ConfigError::BadValue {
                line: raw.line,
                key: key.to_string(),
                reason: "trailing tokens after unit".to_string(),
            });
        }
        match (spec.dim, unit) {
            (Dim::Dimensionless, None) => Ok(Some(value)),
            (Dim::Dimensionless, Some(u)) => Err(ConfigError::BadUnit {
                line: raw.line,
                key: key.to_string(),
                unit: u.to_string(),
                expected: spec.dim.expected(),
            }),
            (dim, None) => Err(ConfigError::MissingUnit {
                line: raw.line,
                key: key.to_string(),
                expected: dim.expected(),
            }),
            (dim, Some(u)) => match dim.factor(u) {
                Some(f) => Ok(Some(value * f)),
                None => Err(ConfigError::BadUnit {
                    line: raw.line,
                    key: key.to_string(),
                    unit: u.to_string(),
                    expected: dim.expected(),
                }),
            },
        }
    };

    let count = |section: &'static str, key: &'static str| -> Result<Option<usize>, ConfigError> {
        let Some(raw) = lookup(section, key) else {
            return Ok(None);
        };
        raw.value
            .parse::<usize>()
            .map(Some)
            .map_err(|e| ConfigError::BadValue {
                line: raw.line,
                key: key.to_string(),
                reason: format!("{e}"),
            })
    };

    let require_num = |section: &'static str, key: &'static str| -> Result<f64, ConfigError> {
        number(section, key)?.ok_or(ConfigError::MissingKey { section, key })
    };

    // Experiment selector.
    let exp_raw = lookup("", "experiment").ok_or(ConfigError::MissingExperiment)?;
    let experiment = match exp_raw.value.as_str() {
        "tension" => Experiment::Tension,
        "shear" => Experiment::Shear,
        "compression" => Experiment::Compression,
        "custom" => Experiment::Custom,
        other => {
            return Err(ConfigError::BadValue {
                line: exp_raw.line,
                key: "experiment".to_string(),
                reason: format!(
                    "`{other}` is not one of tension, shear, compression, custom"
                ),
            })
        }
    };

    // Material block (always required).
    let eta = match number("material", "eta")? {
        Some(v) => v,
        None => {
            log::info!("material.eta not given; defaulting to 0 (fully fracturing)");
            0.0
        }
    };
    let material = MaterialParams::<f64> {
        rho: require_num("material", "rho")?,
        youngs: require_num("material", "youngs")?,
        poisson: require_num("material", "poisson")?,
        friction_angle: require_num("material", "friction_angle")?,
        dilation_angle: require_num("material", "dilation_angle")?,
        kn0: require_num("material", "kn0")?,
        ks0: require_num("material", "ks0")?,
        sigma_t0: require_num("material", "sigma_t0")?,
        c0: require_num("material", "c0")?,
        w_sigma: require_num("material", "w_sigma")?,
        w_c: require_num("material", "w_c")?,
        eta,
    };
    material.validate()?;

    // Schedule block for the patch experiments.
    let schedule = match experiment {
        Experiment::Tension | Experiment::Shear => {
            if lookup("schedule", "steps").is_none() {
                return Err(ConfigError::MissingSection {
                    experiment: experiment.name(),
                    section: "schedule",
                });
            }
            let steps = count("schedule", "steps")?
                .ok_or(ConfigError::MissingKey { section: "schedule", key: "steps" })?;
            let increment = require_num("schedule", "displacement_increment")?;
            let preload = number("schedule", "normal_preload")?.unwrap_or(0.0);
            let substeps = count("schedule", "substeps")?.unwrap_or(10);
            let mode = if experiment == Experiment::Tension {
                LoadMode::Tension
            } else {
                LoadMode::Shear
            };
            Some(LoadSchedule {
                mode,
                steps,
                displacement_increment: increment,
                normal_preload: preload,
                substeps,
            })
        }
        _ => None,
    };

    // Specimen and solver blocks for the solver experiments.
    let (specimen, solver) = match experiment {
        Experiment::Compression | Experiment::Custom => {
            if lookup("specimen", "width").is_none() {
                return Err(ConfigError::MissingSection {
                    experiment: experiment.name(),
                    section: "specimen",
                });
            }
            if lookup("solver", "loading_velocity").is_none() {
                return Err(ConfigError::MissingSection {
                    experiment: experiment.name(),
                    section: "solver",
                });
            }
            let pat_raw = lookup("specimen", "pattern").ok_or(ConfigError::MissingKey {
                section: "specimen",
                key: "pattern",
            })?;
            let pattern = match pat_raw.value.as_str() {
                "structured-quad" => Pattern::StructuredQuad,
                "crossed-triangle" => Pattern::CrossedTriangle,
                "voronoi" => Pattern::Voronoi {
                    seed: count("specimen", "voronoi_seed")?.unwrap_or(0) as u64,
                },
                other => {
                    return Err(ConfigError::BadValue {
                        line: pat_raw.line,
                        key: "pattern".to_string(),
                        reason: format!(
                            "`{other}` is not one of structured-quad, crossed-triangle, voronoi"
                        ),
                    })
                }
            };
            let specimen = SpecimenSpec {
                width: require_num("specimen", "width")?,
                height: require_num("specimen", "height")?,
                particle_size: require_num("specimen", "particle_size")?,
                pattern,
            };
            let defaults = SolverConfig::<f64>::default();
            let solver = SolverConfig {
                damping: number("solver", "damping")?.unwrap_or(defaults.damping),
                timestep_safety: number("solver", "timestep_safety")?
                    .unwrap_or(defaults.timestep_safety),
                loading_velocity: require_num("solver", "loading_velocity")?,
                max_steps: count("solver", "max_steps")?
                    .ok_or(ConfigError::MissingKey { section: "solver", key: "max_steps" })?,
                quasi_static_tolerance: number("solver", "quasi_static_tolerance")?
                    .unwrap_or(defaults.quasi_static_tolerance),
            };
            (Some(specimen), Some(solver))
        }
        _ => (None, None),
    };

    let defaults = OutputConfig::default();
    let output = OutputConfig {
        directory: lookup("output", "directory")
            .map(|r| r.value.clone())
            .unwrap_or(defaults.directory),
        sample_interval: count("output", "sample_interval")?.unwrap_or(defaults.sample_interval),
        snapshot_interval: count("output", "snapshot_interval")?
            .unwrap_or(defaults.snapshot_interval),
    };

    Ok(RunConfig {
        experiment,
        material,
        schedule,
        specimen,
        solver,
        output,
    })
}

/// Parses a config file from disk.
pub fn parse_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Serializes a config in canonical form: fixed key order, strict SI
/// units, shortest round-trip float formatting. `parse_config_str` of the
/// result reproduces the config exactly.
pub fn write_config(cfg: &RunConfig) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "experiment = {}", cfg.experiment.name());
    let m = &cfg.material;
    let _ = writeln!(s, "\n[material]");
    let _ = writeln!(s, "rho = {:?} kg/m3", m.rho);
    let _ = writeln!(s, "youngs = {:?} Pa", m.youngs);
    let _ = writeln!(s, "poisson = {:?}", m.poisson);
    let _ = writeln!(s, "friction_angle = {:?} rad", m.friction_angle);
    let _ = writeln!(s, "dilation_angle = {:?} rad", m.dilation_angle);
    let _ = writeln!(s, "kn0 = {:?} Pa/m", m.kn0);
    let _ = writeln!(s, "ks0 = {:?} Pa/m", m.ks0);
    let _ = writeln!(s, "sigma_t0 = {:?} Pa", m.sigma_t0);
    let _ = writeln!(s, "c0 = {:?} Pa", m.c0);
    let _ = writeln!(s, "w_sigma = {:?} m", m.w_sigma);
    let _ = writeln!(s, "w_c = {:?} m", m.w_c);
    let _ = writeln!(s, "eta = {:?}", m.eta);
    if let Some(sch) = &cfg.schedule {
        let _ = writeln!(s, "\n[schedule]");
        let _ = writeln!(s, "steps = {}", sch.steps);
        let _ = writeln!(s, "displacement_increment = {:?} m", sch.displacement_increment);
        let _ = writeln!(s, "normal_preload = {:?} Pa", sch.normal_preload);
        let _ = writeln!(s, "substeps = {}", sch.substeps);
    }
    if let Some(sp) = &cfg.specimen {
        let _ = writeln!(s, "\n[specimen]");
        let _ = writeln!(s, "width = {:?} m", sp.width);
        let _ = writeln!(s, "height = {:?} m", sp.height);
        let _ = writeln!(s, "particle_size = {:?} m", sp.particle_size);
        match sp.pattern {
            Pattern::StructuredQuad => {
                let _ = writeln!(s, "pattern = structured-quad");
            }
            Pattern::CrossedTriangle => {
                let _ = writeln!(s, "pattern = crossed-triangle");
            }
            Pattern::Voronoi { seed } => {
                let _ = writeln!(s, "pattern = voronoi");
                let _ = writeln!(s, "voronoi_seed = {seed}");
            }
        }
    }
    if let Some(so) = &cfg.solver {
        let _ = writeln!(s, "\n[solver]");
        let _ = writeln!(s, "damping = {:?}", so.damping);
        let _ = writeln!(s, "timestep_safety = {:?}", so.timestep_safety);
        let _ = writeln!(s, "loading_velocity = {:?} m/s", so.loading_velocity);
        let _ = writeln!(s, "max_steps = {}", so.max_steps);
        let _ = writeln!(s, "quasi_static_tolerance = {:?}", so.quasi_static_tolerance);
    }
    let _ = writeln!(s, "\n[output]");
    let _ = writeln!(s, "directory = {}", cfg.output.directory);
    let _ = writeln!(s, "sample_interval = {}", cfg.output.sample_interval);
    let _ = writeln!(s, "snapshot_interval = {}", cfg.output.snapshot_interval);
    s
}

/// Content digest of a config: the SHA-256 of its canonical serialization,
/// so it changes exactly when the effective configuration changes.
pub fn config_digest(cfg: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(write_config(cfg).as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write as _;
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Names of the bundled experiment presets.
pub fn preset_names() -> &'static [&'static str] {
    &["table1_tension", "table1_shear", "table2_compression"]
}

/// Source text of a bundled preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    match name {
        "table1_tension" => Some(include_str!("../presets/table1_tension.cfg")),
        "table1_shear" => Some(include_str!("../presets/table1_shear.cfg")),
        "table2_compression" => Some(include_str!("../presets/table2_compression.cfg")),
        _ => None,
    }
}
