//! Material parameter set shared by the interface model and the particle
//! continuum.

use crate::real::{scalar, Real};
use thiserror::Error;

/// Interface and bulk material constants. Strict SI throughout: Pa, m, kg,
/// s, rad. Config-file units are converted at parse time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams<F: Real> {
    /// Mass density (kg/m³).
    pub rho: F,
    /// Young's modulus of the particle material (Pa).
    pub youngs: F,
    /// Poisson's ratio of the particle material.
    pub poisson: F,
    /// Interface friction angle (rad).
    pub friction_angle: F,
    /// Interface dilation angle (rad): plastic normal opening per unit of
    /// plastic slip is tan of this angle.
    pub dilation_angle: F,
    /// Initial interface normal stiffness (Pa/m).
    pub kn0: F,
    /// Initial interface shear stiffness (Pa/m).
    pub ks0: F,
    /// Initial tensile strength of the interface (Pa).
    pub sigma_t0: F,
    /// Initial cohesion of the interface (Pa).
    pub c0: F,
    /// Inelastic-norm value at which tensile strength reaches zero (m).
    pub w_sigma: F,
    /// Inelastic-norm value at which cohesion reaches zero (m).
    pub w_c: F,
    /// Plastic (irreversible) fraction of inelastic normal displacement,
    /// in [0, 1]. Zero means the unloading path returns to the origin.
    pub eta: F,
}

/// Parameter validation failure.
#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("material parameter `{0}` must be strictly positive, got {1}")]
    NonPositive(&'static str, f64),
    #[error("material parameter `{0}` must be finite")]
    NonFinite(&'static str),
    #[error("eta must lie in [0, 1], got {0}")]
    EtaOutOfRange(f64),
    #[error("friction angle must lie in [0, pi/2), got {0} rad")]
    FrictionOutOfRange(f64),
    #[error("poisson ratio must lie in (-1, 0.5), got {0}")]
    PoissonOutOfRange(f64),
}

impl<F: Real> MaterialParams<F> {
    /// Checks the admissibility of the parameter set.
    pub fn validate(&self) -> Result<(), MaterialError> {
        let positives: [(&'static str, F); 7] = [
            ("rho", self.rho),
            ("youngs", self.youngs),
            ("kn0", self.kn0),
            ("ks0", self.ks0),
            ("sigma_t0", self.sigma_t0),
            ("w_sigma", self.w_sigma),
            ("w_c", self.w_c),
        ];
        for (name, v) in positives {
            if !v.is_finite() {
                return Err(MaterialError::NonFinite(name));
            }
            if v <= F::zero() {
                return Err(MaterialError::NonPositive(name, v.as_f64()));
            }
        }
        if !self.c0.is_finite() || self.c0 < F::zero() {
            return Err(MaterialError::NonPositive("c0", self.c0.as_f64()));
        }
        if !self.eta.is_finite() || self.eta < F::zero() || self.eta > F::one() {
            return Err(MaterialError::EtaOutOfRange(self.eta.as_f64()));
        }
        let half_pi = F::from_f64(core::f64::consts::FRAC_PI_2).unwrap();
        if !self.friction_angle.is_finite()
            || self.friction_angle < F::zero()
            || self.friction_angle >= half_pi
        {
            return Err(MaterialError::FrictionOutOfRange(
                self.friction_angle.as_f64(),
            ));
        }
        if !self.dilation_angle.is_finite() || self.dilation_angle < F::zero() {
            return Err(MaterialError::NonFinite("dilation_angle"));
        }
        if !self.poisson.is_finite()
            || self.poisson <= -F::one()
            || self.poisson >= scalar(0.5)
        {
            return Err(MaterialError::PoissonOutOfRange(self.poisson.as_f64()));
        }
        Ok(())
    }

    /// Mode-I fracture energy: the area under the tensile softening
    /// triangle, `sigma_t0 * w_sigma / 2` (J/m²).
    pub fn mode_i_fracture_energy(&self) -> F {
        self.sigma_t0 * self.w_sigma / scalar(2.0)
    }

    /// Mode-II fracture energy: the area under the cohesion softening
    /// triangle, `c0 * w_c / 2` (J/m²).
    pub fn mode_ii_fracture_energy(&self) -> F {
        self.c0 * self.w_c / scalar(2.0)
    }

    /// Transjurane sandstone laboratory set (tension / direct-shear
    /// verification material).
    pub fn transjurane_sandstone() -> Self {
        Self {
            rho: scalar(2600.0),
            youngs: scalar(12.5e9),
            poisson: scalar(0.3),
            friction_angle: scalar(41f64.to_radians()),
            dilation_angle: scalar(10f64.to_radians()),
            kn0: scalar(2.2321e14),
            ks0: scalar(6.573e13),
            sigma_t0: scalar(2.8e6),
            c0: scalar(8.5e6),
            w_sigma: scalar(2.8e-5),
            w_c: scalar(1.205e-5),
            eta: F::zero(),
        }
    }

    /// Gosford sandstone laboratory set (uniaxial-compression material).
    pub fn gosford_sandstone() -> Self {
        Self {
            rho: scalar(2600.0),
            youngs: scalar(7.0e9),
            poisson: scalar(0.25),
            friction_angle: scalar(40f64.to_radians()),
            dilation_angle: scalar(5f64.to_radians()),
            kn0: scalar(6.0e12),
            ks0: scalar(3.0e12),
            sigma_t0: scalar(6.0e6),
            c0: scalar(15.0e6),
            w_sigma: scalar(1.0e-4),
            w_c: scalar(1.5e-4),
            eta: F::zero(),
        }
    }
}
