//! Cohesive interface constitutive model.
//!
//! Tractions across an interface follow a linear-elastic branch up to a
//! failure surface built from tensile strength and cohesion. Both strength
//! terms soften linearly with a single history parameter, the norm of the
//! accumulated inelastic relative displacement (`u_ieff`). A damage
//! variable derived from the degraded normal secant stiffness reduces both
//! stiffnesses in tension; in compression the initial stiffnesses always
//! apply. Yield is integrated with explicit sub-stepping: each trial
//! traction is scaled back along the traction increment onto the current
//! surface and the unreturned displacement is booked as inelastic.

use crate::material::MaterialParams;
use crate::real::{scalar, Real};
use thiserror::Error;

/// `tan(friction_angle)` below which the failure surface degenerates and a
/// cohesion-only (Tresca) form `tau^2 - c^2` is used instead.
pub const TRESCA_TAN_PHI_THRESHOLD: f64 = 1e-6;

/// Evolving state of one interface integration point.
///
/// Openings and tensile tractions are positive; `u_s`/`tau` follow the
/// interface tangent. Plastic components are the irreversible share of the
/// inelastic displacement; `ui_*` accumulate the full inelastic components
/// (plastic plus fracturing) that feed the history norm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InterfaceState<F: Real> {
    /// Total normal relative displacement (m), opening positive.
    pub u_n: F,
    /// Total shear relative displacement (m).
    pub u_s: F,
    /// Plastic normal displacement (m).
    pub up_n: F,
    /// Plastic shear displacement (m).
    pub up_s: F,
    /// Accumulated inelastic normal displacement (m).
    pub ui_n: F,
    /// Accumulated inelastic shear displacement (m).
    pub ui_s: F,
    /// History maximum of the inelastic displacement norm (m);
    /// non-decreasing along any loading path.
    pub u_ieff: F,
    /// Damage, the fractured fraction of the interface area, in [0, 1].
    pub damage: F,
    /// Current normal traction (Pa), tension positive.
    pub sigma_n: F,
    /// Current shear traction (Pa).
    pub tau: F,
    /// Set once both strength terms have softened to zero.
    pub broken: bool,
}

impl<F: Real> InterfaceState<F> {
    /// Integrity factor that scales the initial stiffnesses: `1 - damage`
    /// while the (full-stiffness) normal traction would be tensile, `1`
    /// otherwise. The sign is taken from the displacement span so the
    /// factor is well defined even when the degraded traction is zero.
    pub fn alpha(&self) -> F {
        if self.u_n - self.up_n > F::zero() {
            F::one() - self.damage
        } else {
            F::one()
        }
    }
}

/// Outcome of a traction evaluation or state update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TractionResult<F: Real> {
    /// Normal traction (Pa), tension positive.
    pub sigma_n: F,
    /// Shear traction (Pa).
    pub tau: F,
    /// True if any sub-increment touched the failure surface.
    pub yielded: bool,
    /// Incremental dissipated energy per unit interface area (J/m²).
    pub dissipated: F,
}

/// Constitutive evaluation failure.
#[derive(Debug, Error)]
pub enum ConstitutiveError {
    #[error("non-finite displacement increment ({0}, {1})")]
    NonFiniteIncrement(f64, f64),
    #[error("n_substeps must be at least 1")]
    ZeroSubsteps,
}

/// Euclidean norm of the inelastic displacement components.
pub fn inelastic_norm<F: Real>(normal: F, shear: F) -> F {
    normal.hypot(shear)
}

/// Tensile strength after softening: linear decay from `sigma_t0` at zero
/// history to zero at `w_sigma`, closed at the top (exactly zero for
/// `u_ieff >= w_sigma`).
pub fn tensile_strength<F: Real>(p: &MaterialParams<F>, u_ieff: F) -> F {
    if u_ieff >= p.w_sigma {
        F::zero()
    } else {
        p.sigma_t0 * (F::one() - u_ieff / p.w_sigma)
    }
}

/// Cohesion after softening: linear decay from `c0` to zero at `w_c`.
pub fn cohesion<F: Real>(p: &MaterialParams<F>, u_ieff: F) -> F {
    if u_ieff >= p.w_c {
        F::zero()
    } else {
        p.c0 * (F::one() - u_ieff / p.w_c)
    }
}

/// Degraded normal secant stiffness: the slope from the plastic anchor
/// through the current softening envelope,
/// `sigma_t / (sigma_t/kn0 + (1 - eta) u_ieff)`.
///
/// Returns `kn0` at zero history and exactly zero once the tensile
/// strength is exhausted (the 0/0 limit is defined as zero).
pub fn degraded_normal_stiffness<F: Real>(p: &MaterialParams<F>, u_ieff: F) -> F {
    let st = tensile_strength(p, u_ieff);
    if st <= F::zero() {
        return F::zero();
    }
    st / (st / p.kn0 + (F::one() - p.eta) * u_ieff)
}

/// Damage variable: fractured area fraction `1 - k_ns/kn0`, in [0, 1] and
/// non-decreasing in the history parameter.
pub fn damage<F: Real>(p: &MaterialParams<F>, u_ieff: F) -> F {
    let d = F::one() - degraded_normal_stiffness(p, u_ieff) / p.kn0;
    d.max(F::zero()).min(F::one())
}

/// Integrity factor: `1 - damage` in tension, `1` in compression. The
/// indeterminate point `sigma_n = 0` takes the compression-side limit so a
/// traction sign change cannot spuriously drop stiffness.
pub fn integrity<F: Real>(damage: F, sigma_n: F) -> F {
    if sigma_n > F::zero() {
        F::one() - damage
    } else {
        F::one()
    }
}

/// Failure surface value (Pa²) with the friction tangent precomputed.
/// Negative inside the elastic domain, non-negative at yield.
pub fn failure_function_tan<F: Real>(sigma_n: F, tau: F, sigma_t: F, c: F, tan_phi: F) -> F {
    if tan_phi < scalar(TRESCA_TAN_PHI_THRESHOLD) {
        tau * tau - c * c
    } else {
        tau * tau
            - scalar::<F>(2.0) * c * tan_phi * (sigma_t - sigma_n)
            - tan_phi * tan_phi * (sigma_n * sigma_n - sigma_t * sigma_t)
    }
}

/// Failure surface value (Pa²) for a friction angle in radians. When the
/// tangent falls below [`TRESCA_TAN_PHI_THRESHOLD`] the cohesion-only form
/// `tau^2 - c^2` is used.
pub fn failure_function<F: Real>(sigma_n: F, tau: F, sigma_t: F, c: F, phi: F) -> F {
    failure_function_tan(sigma_n, tau, sigma_t, c, phi.tan())
}

/// Trial tractions for a displacement increment with the internal state
/// (history norm, damage, plastic displacements) frozen.
///
/// The integrity factor is resolved from the sign of the full-stiffness
/// trial normal traction; scaling by a non-negative factor cannot change
/// that sign, so one pass suffices.
pub fn elastic_trial<F: Real>(
    state: &InterfaceState<F>,
    p: &MaterialParams<F>,
    du_n: F,
    du_s: F,
) -> TractionResult<F> {
    let span_n = state.u_n + du_n - state.up_n;
    let span_s = state.u_s + du_s - state.up_s;
    let alpha = if span_n > F::zero() {
        F::one() - state.damage
    } else {
        F::one()
    };
    let sigma_n = alpha * p.kn0 * span_n;
    let tau = alpha * p.ks0 * span_s;
    let sigma_t = tensile_strength(p, state.u_ieff);
    let c = cohesion(p, state.u_ieff);
    let f = failure_function(sigma_n, tau, sigma_t, c, p.friction_angle);
    TractionResult {
        sigma_n,
        tau,
        yielded: f >= F::zero() || sigma_n > sigma_t,
        dissipated: F::zero(),
    }
}

/// Shear traction the failure surface admits at a given normal traction
/// and strength pair. Zero where the surface has no real branch.
pub fn shear_capacity<F: Real>(sigma_n: F, sigma_t: F, c: F, tan_phi: F) -> F {
    if tan_phi < scalar(TRESCA_TAN_PHI_THRESHOLD) {
        return c;
    }
    let two = scalar::<F>(2.0);
    let val = tan_phi * (sigma_t - sigma_n) * (two * c - tan_phi * (sigma_n + sigma_t));
    val.max(F::zero()).sqrt()
}

/// Advances an interface state through a relative displacement increment.
///
/// The increment is split into `n_substeps` equal parts. Each part is
/// applied elastically with the internal state frozen; if the trial
/// traction leaves the admissible domain (failure surface, or normal
/// traction above the current tensile strength) it is scaled back onto
/// the domain boundary — normal traction capped at the tensile strength,
/// shear traction capped at the surface's [`shear_capacity`] at that
/// normal traction — and the displacement span in excess of the capped
/// tractions is booked as inelastic:
///
/// - shear bookings are entirely plastic slip, with dilation adding
///   `tan(dilation_angle) * |slip|` of plastic normal opening;
/// - normal bookings occur only on the tensile side (the cutoff), and
///   split `eta` plastic / `1 - eta` fracturing.
///
/// The history norm, strengths, stiffness and damage are then refreshed
/// and the tractions re-evaluated from the degraded stiffnesses. Energy
/// dissipated by the inelastic increments is accumulated into the result.
pub fn update_interface<F: Real>(
    state: &InterfaceState<F>,
    p: &MaterialParams<F>,
    du_n: F,
    du_s: F,
    n_substeps: usize,
) -> Result<(InterfaceState<F>, TractionResult<F>), ConstitutiveError> {
    if !du_n.is_finite() || !du_s.is_finite() {
        return Err(ConstitutiveError::NonFiniteIncrement(
            du_n.as_f64(),
            du_s.as_f64(),
        ));
    }
    if n_substeps == 0 {
        return Err(ConstitutiveError::ZeroSubsteps);
    }

    let tan_phi = p.friction_angle.tan();
    let tan_dil = p.dilation_angle.tan();
    let n = F::from_usize(n_substeps).unwrap();
    let ddn = du_n / n;
    let dds = du_s / n;
    let half = scalar::<F>(0.5);

    let mut s = *state;
    let mut dissipated = F::zero();
    let mut yielded_any = false;

    for _ in 0..n_substeps {
        s.u_n = s.u_n + ddn;
        s.u_s = s.u_s + dds;

        let span_n = s.u_n - s.up_n;
        let span_s = s.u_s - s.up_s;
        let alpha = if span_n > F::zero() {
            F::one() - s.damage
        } else {
            F::one()
        };
        let sig_trial = alpha * p.kn0 * span_n;
        let tau_trial = alpha * p.ks0 * span_s;

        let sigma_t = tensile_strength(p, s.u_ieff);
        let c = cohesion(p, s.u_ieff);
        let f_trial = failure_function_tan(sig_trial, tau_trial, sigma_t, c, tan_phi);
        let above_cutoff = sig_trial > sigma_t;

        if f_trial < F::zero() && !above_cutoff {
            s.sigma_n = sig_trial;
            s.tau = tau_trial;
            continue;
        }

        // Return mapping: cap the normal traction at the tensile cutoff,
        // then the shear traction at the surface capacity there; the
        // displacement span behind each traction excess books as
        // inelastic. With the interface fully degraded (alpha = 0) the
        // trial tractions are already zero and nothing books.
        let mut din_n = F::zero();
        let mut din_s = F::zero();
        let sig_capped = sig_trial.min(sigma_t);
        if alpha > F::zero() {
            if above_cutoff {
                din_n = (sig_trial - sigma_t) / (alpha * p.kn0);
            }
            let cap = shear_capacity(sig_capped, sigma_t, c, tan_phi);
            if tau_trial.abs() > cap {
                din_s = tau_trial.signum() * (tau_trial.abs() - cap) / (alpha * p.ks0);
            }
        }
        if din_n == F::zero() && din_s == F::zero() {
            // On or outside a degenerate surface branch with nothing to
            // return (e.g. a broken interface); carry the trial tractions.
            s.sigma_n = sig_trial;
            s.tau = tau_trial;
            continue;
        }
        yielded_any = true;

        s.ui_s += din_s;
        s.up_s += din_s;
        s.ui_n += din_n;
        s.up_n += p.eta * din_n;
        let dil = tan_dil * din_s.abs();
        s.up_n += dil;
        s.ui_n += dil;

        let norm = inelastic_norm(s.ui_n, s.ui_s);
        if norm > s.u_ieff {
            s.u_ieff = norm;
        }

        // Refresh softened quantities and re-evaluate tractions.
        s.damage = damage(p, s.u_ieff);
        let span_n2 = s.u_n - s.up_n;
        let alpha2 = if span_n2 > F::zero() {
            F::one() - s.damage
        } else {
            F::one()
        };
        let sig_new = alpha2 * p.kn0 * span_n2;
        let tau_new = alpha2 * p.ks0 * (s.u_s - s.up_s);

        let tau_capped = tau_trial.signum() * tau_trial.abs().min(
            shear_capacity(sig_capped, sigma_t, c, tan_phi),
        );
        let de = half * (sig_capped + sig_new) * (din_n + dil)
            + half * (tau_capped + tau_new) * din_s;
        if de > F::zero() {
            dissipated += de;
        }

        s.sigma_n = sig_new;
        s.tau = tau_new;

        if !s.broken
            && tensile_strength(p, s.u_ieff) == F::zero()
            && cohesion(p, s.u_ieff) == F::zero()
        {
            s.broken = true;
        }
    }

    Ok((
        s,
        TractionResult {
            sigma_n: s.sigma_n,
            tau: s.tau,
            yielded: yielded_any,
            dissipated,
        },
    ))
}
