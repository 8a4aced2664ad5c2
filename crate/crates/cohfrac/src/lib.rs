//! Mixed-mode cohesive fracture interface model with a small 2-D
//! distinct-element test bench.
//!
//! The crate provides:
//!
//! - [`constitutive`]: the interface traction–separation model (linear
//!   softening of tensile strength and cohesion, damage-based stiffness
//!   degradation in tension, a friction-angle failure surface, and an
//!   explicit sub-stepped return mapping),
//! - [`patch`]: displacement-controlled two-block rigs for uniaxial
//!   tension and direct shear,
//! - [`mesh`]: tessellation of rectangular specimens into polygonal
//!   particles with cohesive interfaces along all shared edges,
//! - [`solver`]: an explicit dynamic-relaxation solver with
//!   constant-strain-triangle particles and local non-viscous damping,
//! - [`config`], [`harness`], [`output`]: the key-value run-configuration
//!   format, the experiment drivers and the CSV/snapshot/summary writers
//!   behind the `cohfrac` binary.
//!
//! All numerics are generic over the scalar type through [`Real`]
//! (`f32` or `f64`); the aliases below fix the common `f64` choice.

pub mod config;
pub mod constitutive;
pub mod harness;
pub mod material;
pub mod mesh;
pub mod output;
pub mod patch;
pub mod real;
pub mod solver;

pub use constitutive::{InterfaceState, TractionResult};
pub use material::MaterialParams;
pub use real::Real;

/// Material parameters at the default `f64` precision.
pub type MaterialParams64 = material::MaterialParams<f64>;
/// Interface state at `f64` precision.
pub type InterfaceState64 = constitutive::InterfaceState<f64>;
/// Mesh at `f64` precision.
pub type Mesh64 = mesh::Mesh<f64>;
/// Patch-test curve at `f64` precision.
pub type CurveRecord64 = patch::CurveRecord<f64>;
/// Solver configuration at `f64` precision.
pub type SolverConfig64 = solver::SolverConfig<f64>;
