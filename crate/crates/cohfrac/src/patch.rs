//! Two-block patch rigs.
//!
//! A single interface between two rigid blocks, driven by a prescribed
//! relative-displacement schedule. The rigs isolate the interface response
//! from inertia and particle elasticity: the tension rig opens the
//! interface, the direct-shear rig slides it under a constant compressive
//! normal traction.

use crate::constitutive::{
    cohesion, degraded_normal_stiffness, tensile_strength, update_interface,
    ConstitutiveError, InterfaceState,
};
use crate::material::MaterialParams;
use crate::real::Real;
use thiserror::Error;

/// Which of the two canonical rigs a schedule drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Pure opening, zero preload.
    Tension,
    /// Pure slip under a compressive normal preload.
    Shear,
}

/// Displacement-controlled load schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSchedule<F: Real> {
    pub mode: LoadMode,
    /// Number of driven steps; the record holds `steps + 1` rows.
    pub steps: usize,
    /// Relative displacement applied per step (m).
    pub displacement_increment: F,
    /// Normal traction held on the interface in shear mode (Pa,
    /// compressive i.e. non-positive). Must be zero in tension mode.
    pub normal_preload: F,
    /// Constitutive sub-increments per step.
    pub substeps: usize,
}

impl<F: Real> LoadSchedule<F> {
    pub fn tension(steps: usize, displacement_increment: F) -> Self {
        Self {
            mode: LoadMode::Tension,
            steps,
            displacement_increment,
            normal_preload: F::zero(),
            substeps: 10,
        }
    }

    pub fn shear(steps: usize, displacement_increment: F, normal_preload: F) -> Self {
        Self {
            mode: LoadMode::Shear,
            steps,
            displacement_increment,
            normal_preload,
            substeps: 10,
        }
    }
}

/// One sampled row of a patch run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSample<F: Real> {
    pub step: usize,
    /// Applied relative displacement: opening in tension, slip in shear (m).
    pub displacement: F,
    /// Driven traction: normal stress in tension, shear stress in shear (Pa).
    pub traction: F,
    /// Normal traction carried alongside (equals `traction` in tension,
    /// the preload in shear) (Pa).
    pub normal_traction: F,
    pub u_ieff: F,
    pub damage: F,
    pub alpha: F,
    /// Active stiffness: degraded normal secant in tension, alpha-scaled
    /// shear stiffness in shear (Pa/m).
    pub stiffness: F,
    /// Remaining strength: tensile strength in tension, cohesion in shear (Pa).
    pub strength: F,
    /// Dissipated energy accumulated up to this row (J/m²).
    pub dissipated: F,
}

/// Full sampled curve of a patch run.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord<F: Real> {
    pub mode: LoadMode,
    pub samples: Vec<PatchSample<F>>,
}

impl<F: Real> CurveRecord<F> {
    /// Row with the largest driven traction.
    pub fn peak(&self) -> &PatchSample<F> {
        self.samples
            .iter()
            .max_by(|a, b| a.traction.partial_cmp(&b.traction).unwrap())
            .expect("record is never empty")
    }

    /// Total dissipated energy per unit area over the run (J/m²).
    pub fn total_dissipated(&self) -> F {
        self.samples.last().map(|s| s.dissipated).unwrap_or(F::zero())
    }
}

#[derive(Debug, Error)]
pub enum PatchError {
    #[error("schedule must have at least one step")]
    EmptySchedule,
    #[error("displacement increment must be finite, got {0}")]
    BadIncrement(f64),
    #[error("tension schedule cannot carry a normal preload ({0} Pa)")]
    PreloadInTension(f64),
    #[error("shear schedule requires a compressive (non-positive) preload, got {0} Pa")]
    TensilePreload(f64),
    #[error("schedule mode does not match the rig")]
    WrongMode,
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

fn validate<F: Real>(sched: &LoadSchedule<F>, mode: LoadMode) -> Result<(), PatchError> {
    if sched.mode != mode {
        return Err(PatchError::WrongMode);
    }
    if sched.steps == 0 {
        return Err(PatchError::EmptySchedule);
    }
    if !sched.displacement_increment.is_finite() {
        return Err(PatchError::BadIncrement(
            sched.displacement_increment.as_f64(),
        ));
    }
    match mode {
        LoadMode::Tension => {
            if sched.normal_preload != F::zero() {
                return Err(PatchError::PreloadInTension(sched.normal_preload.as_f64()));
            }
        }
        LoadMode::Shear => {
            if sched.normal_preload > F::zero() {
                return Err(PatchError::TensilePreload(sched.normal_preload.as_f64()));
            }
        }
    }
    Ok(())
}

fn tension_sample<F: Real>(
    p: &MaterialParams<F>,
    state: &InterfaceState<F>,
    step: usize,
    dissipated: F,
) -> PatchSample<F> {
    PatchSample {
        step,
        displacement: state.u_n,
        traction: state.sigma_n,
        normal_traction: state.sigma_n,
        u_ieff: state.u_ieff,
        damage: state.damage,
        alpha: state.alpha(),
        stiffness: degraded_normal_stiffness(p, state.u_ieff),
        strength: tensile_strength(p, state.u_ieff),
        dissipated,
    }
}

/// Drives the interface in pure opening and records the full softening
/// curve together with the damage, integrity, stiffness and strength
/// histories.
pub fn run_tension_patch<F: Real>(
    p: &MaterialParams<F>,
    sched: &LoadSchedule<F>,
) -> Result<CurveRecord<F>, PatchError> {
    validate(sched, LoadMode::Tension)?;
    let mut state = InterfaceState::<F>::default();
    let mut dissipated = F::zero();
    let mut samples = Vec::with_capacity(sched.steps + 1);
    samples.push(tension_sample(p, &state, 0, dissipated));
    for step in 1..=sched.steps {
        let (next, r) = update_interface(
            &state,
            p,
            sched.displacement_increment,
            F::zero(),
            sched.substeps,
        )?;
        state = next;
        dissipated += r.dissipated;
        samples.push(tension_sample(p, &state, step, dissipated));
    }
    Ok(CurveRecord {
        mode: LoadMode::Tension,
        samples,
    })
}

fn shear_sample<F: Real>(
    p: &MaterialParams<F>,
    state: &InterfaceState<F>,
    step: usize,
    dissipated: F,
) -> PatchSample<F> {
    PatchSample {
        step,
        displacement: state.u_s,
        traction: state.tau,
        normal_traction: state.sigma_n,
        u_ieff: state.u_ieff,
        damage: state.damage,
        alpha: state.alpha(),
        stiffness: state.alpha() * p.ks0,
        strength: cohesion(p, state.u_ieff),
        dissipated,
    }
}

/// Drives the interface in pure slip under the schedule's compressive
/// normal preload.
///
/// The rig zeroes the friction and dilation angles on its working copy of
/// the material so that cohesion alone governs the slip strength and the
/// normal state stays untouched; the recorded normal traction and both
/// stiffnesses therefore remain constant for the whole run.
pub fn run_shear_patch<F: Real>(
    p: &MaterialParams<F>,
    sched: &LoadSchedule<F>,
) -> Result<CurveRecord<F>, PatchError> {
    validate(sched, LoadMode::Shear)?;
    let mut rig = *p;
    rig.friction_angle = F::zero();
    rig.dilation_angle = F::zero();

    let mut state = InterfaceState::<F>::default();
    if sched.normal_preload < F::zero() {
        let (seated, r) =
            update_interface(&state, &rig, sched.normal_preload / rig.kn0, F::zero(), 1)?;
        debug_assert!(!r.yielded);
        state = seated;
    }

    let mut dissipated = F::zero();
    let mut samples = Vec::with_capacity(sched.steps + 1);
    samples.push(shear_sample(&rig, &state, 0, dissipated));
    for step in 1..=sched.steps {
        let (next, r) = update_interface(
            &state,
            &rig,
            F::zero(),
            sched.displacement_increment,
            sched.substeps,
        )?;
        state = next;
        dissipated += r.dissipated;
        samples.push(shear_sample(&rig, &state, step, dissipated));
    }
    Ok(CurveRecord {
        mode: LoadMode::Shear,
        samples,
    })
}
