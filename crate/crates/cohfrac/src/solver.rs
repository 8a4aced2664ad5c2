//! Explicit dynamic-relaxation distinct-element solver.
//!
//! Particles are linear-elastic (plane strain) and carry their internal
//! forces through a constant-strain-triangle subdivision; interfaces
//! transfer cohesive tractions evaluated by the constitutive model at two
//! end-point integration points. Nodes integrate with central differences
//! under local non-viscous damping (force-proportional, opposing the
//! velocity sign per component), and boundary conditions prescribe nodal
//! velocities.
//!
//! Force evaluation over elements and interfaces is data-parallel with a
//! fixed-order serial reduction, so results are bit-identical regardless
//! of the number of worker threads.

use crate::constitutive::{update_interface, ConstitutiveError, InterfaceState};
use crate::material::MaterialParams;
use crate::mesh::{boundary_sets, Mesh};
use crate::real::{scalar, Real};
use rayon::prelude::*;
use thiserror::Error;

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<F: Real> {
    /// Local damping coefficient (dimensionless force fraction).
    pub damping: F,
    /// Fraction of the stability limit used as the time step, in (0, 1].
    pub timestep_safety: F,
    /// Platen speed for driven experiments (m/s).
    pub loading_velocity: F,
    /// Hard step limit for driven experiments.
    pub max_steps: usize,
    /// Kinetic/strain energy ratio accepted as quasi-static.
    pub quasi_static_tolerance: F,
}

impl<F: Real> Default for SolverConfig<F> {
    fn default() -> Self {
        Self {
            damping: scalar(0.8),
            timestep_safety: scalar(0.1),
            loading_velocity: scalar(0.01),
            max_steps: 1_000_000,
            quasi_static_tolerance: scalar(1e-3),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("triangle {0} has non-positive area; the mesh is inverted or degenerate")]
    InvertedElement(usize),
    #[error("node {0} has zero mass")]
    ZeroMass(usize),
    #[error("zero stiffness encountered while sizing the time step")]
    ZeroStiffness,
    #[error("solver config invalid: {0}")]
    BadConfig(&'static str),
    #[error("interface {id}: {source}")]
    Interface {
        id: usize,
        source: ConstitutiveError,
    },
    #[error("non-finite state at step {0}")]
    NonFinite(usize),
    #[error(
        "energy blow-up at step {step} (kinetic {kinetic:.3e} J vs strain {strain:.3e} J); \
         try a smaller timestep_safety"
    )]
    Instability { step: usize, kinetic: f64, strain: f64 },
}

/// Precomputed constant-strain-triangle geometry: shape-function gradients
/// and area.
#[derive(Debug, Clone, Copy)]
struct ElemGeom<F> {
    bx: [F; 3],
    by: [F; 3],
    area: F,
}

/// Stability time step of an undamped single degree of freedom,
/// `2 sqrt(m / k)`.
pub(crate) fn single_dof_timestep<F: Real>(mass: F, stiffness: F) -> F {
    scalar::<F>(2.0) * (mass / stiffness).sqrt()
}

fn plane_strain_moduli<F: Real>(p: &MaterialParams<F>) -> (F, F, F) {
    let one = F::one();
    let two = scalar::<F>(2.0);
    let nu = p.poisson;
    let e = p.youngs;
    let d11 = e * (one - nu) / ((one + nu) * (one - two * nu));
    let d12 = e * nu / ((one + nu) * (one - two * nu));
    let d33 = e / (two * (one + nu));
    (d11, d12, d33)
}

fn element_geometry<F: Real>(mesh: &Mesh<F>) -> Result<Vec<ElemGeom<F>>, SolverError> {
    let two = scalar::<F>(2.0);
    mesh.triangles
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let p: [[F; 2]; 3] = [
                mesh.nodes[t.nodes[0]],
                mesh.nodes[t.nodes[1]],
                mesh.nodes[t.nodes[2]],
            ];
            let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
            if det <= F::zero() {
                return Err(SolverError::InvertedElement(ti));
            }
            let area = det / two;
            Ok(ElemGeom {
                bx: [
                    (p[1][1] - p[2][1]) / det,
                    (p[2][1] - p[0][1]) / det,
                    (p[0][1] - p[1][1]) / det,
                ],
                by: [
                    (p[2][0] - p[1][0]) / det,
                    (p[0][0] - p[2][0]) / det,
                    (p[1][0] - p[0][0]) / det,
                ],
                area,
            })
        })
        .collect()
}

fn lumped_masses<F: Real>(
    mesh: &Mesh<F>,
    geom: &[ElemGeom<F>],
    rho: F,
) -> Result<Vec<F>, SolverError> {
    let third = F::one() / scalar::<F>(3.0);
    let mut mass = vec![F::zero(); mesh.nodes.len()];
    for (t, g) in mesh.triangles.iter().zip(geom) {
        let share = rho * g.area * third;
        for &n in &t.nodes {
            mass[n] += share;
        }
    }
    for (i, &m) in mass.iter().enumerate() {
        if !(m > F::zero()) {
            return Err(SolverError::ZeroMass(i));
        }
    }
    Ok(mass)
}

/// Largest stable explicit time step for the mesh, scaled by `safety`:
/// the single-degree-of-freedom limit `2 sqrt(m/k)` minimized over nodes,
/// with nodal stiffness summed from adjacent element diagonal terms and
/// interface stiffness times tributary length.
pub fn stable_timestep<F: Real>(
    mesh: &Mesh<F>,
    params: &MaterialParams<F>,
    safety: F,
) -> Result<F, SolverError> {
    if !(safety > F::zero()) || safety > F::one() {
        return Err(SolverError::BadConfig("timestep_safety must lie in (0, 1]"));
    }
    let geom = element_geometry(mesh)?;
    let mass = lumped_masses(mesh, &geom, params.rho)?;
    let (d11, _, d33) = plane_strain_moduli(params);

    let mut kx = vec![F::zero(); mesh.nodes.len()];
    let mut ky = vec![F::zero(); mesh.nodes.len()];
    for (t, g) in mesh.triangles.iter().zip(&geom) {
        for i in 0..3 {
            let n = t.nodes[i];
            kx[n] += g.area * (g.bx[i] * g.bx[i] * d11 + g.by[i] * g.by[i] * d33);
            ky[n] += g.area * (g.by[i] * g.by[i] * d11 + g.bx[i] * g.bx[i] * d33);
        }
    }
    let k_if = params.kn0.max(params.ks0);
    for f in &mesh.interfaces {
        let trib = f.tributary_length();
        for &n in f.nodes_a.iter().chain(f.nodes_b.iter()) {
            kx[n] += k_if * trib;
            ky[n] += k_if * trib;
        }
    }

    let mut dt = F::infinity();
    for i in 0..mesh.nodes.len() {
        let k = kx[i].max(ky[i]);
        if !(k > F::zero()) {
            return Err(SolverError::ZeroStiffness);
        }
        dt = dt.min(single_dof_timestep(mass[i], k));
    }
    Ok(safety * dt)
}

/// Per-interface staged results of one force evaluation.
#[derive(Debug, Clone, Copy)]
struct IfaceStep<F: Real> {
    states: [InterfaceState<F>; 2],
    /// Forces on `nodes_a[0]`, `nodes_a[1]`, `nodes_b[0]`, `nodes_b[1]`.
    forces: [[F; 2]; 4],
    dissipated: F,
    failed: bool,
}

/// One mutable simulation over a mesh.
pub struct Simulation<'m, F: Real> {
    pub mesh: &'m Mesh<F>,
    pub params: MaterialParams<F>,
    pub cfg: SolverConfig<F>,
    geom: Vec<ElemGeom<F>>,
    d11: F,
    d12: F,
    d33: F,
    /// Lumped nodal masses (kg per unit thickness).
    pub mass: Vec<F>,
    /// Time step, fixed at construction.
    pub dt: F,
    prescribed: Vec<(usize, usize, F)>,
    pub displacement: Vec<[F; 2]>,
    pub velocity: Vec<[F; 2]>,
    /// Assembled nodal forces of the latest evaluation (N per unit
    /// thickness), before damping.
    pub force: Vec<[F; 2]>,
    /// Two end-point integration states per interface.
    pub interface_states: Vec<InterfaceState<F>>,
    pub time: F,
    pub step_count: usize,
    /// Total energy dissipated by the interfaces (J per unit thickness).
    pub dissipated: F,
    elem_out: Vec<[[F; 2]; 3]>,
    iface_out: Vec<IfaceStep<F>>,
}

impl<'m, F: Real> Simulation<'m, F> {
    pub fn new(
        mesh: &'m Mesh<F>,
        params: MaterialParams<F>,
        cfg: SolverConfig<F>,
    ) -> Result<Self, SolverError> {
        if !(cfg.damping >= F::zero()) {
            return Err(SolverError::BadConfig("damping must be non-negative"));
        }
        let geom = element_geometry(mesh)?;
        let mass = lumped_masses(mesh, &geom, params.rho)?;
        let (d11, d12, d33) = plane_strain_moduli(&params);
        let dt = stable_timestep(mesh, &params, cfg.timestep_safety)?;
        let nn = mesh.nodes.len();
        Ok(Self {
            mesh,
            params,
            cfg,
            geom,
            d11,
            d12,
            d33,
            mass,
            dt,
            prescribed: Vec::new(),
            displacement: vec![[F::zero(); 2]; nn],
            velocity: vec![[F::zero(); 2]; nn],
            force: vec![[F::zero(); 2]; nn],
            interface_states: vec![InterfaceState::default(); mesh.interfaces.len() * 2],
            time: F::zero(),
            step_count: 0,
            dissipated: F::zero(),
            elem_out: vec![[[F::zero(); 2]; 3]; mesh.triangles.len()],
            iface_out: Vec::new(),
        })
    }

    /// Prescribes a nodal velocity component (`axis` 0 = x, 1 = y).
    /// Prescriptions are applied in insertion order after every
    /// integration update.
    pub fn prescribe(&mut self, node: usize, axis: usize, velocity: F) {
        self.prescribed.push((node, axis, velocity));
    }

    /// Plane-strain stresses `[sxx, syy, sxy]` of every triangle at the
    /// current displacements.
    pub fn element_stresses(&self) -> Vec<[F; 3]> {
        self.mesh
            .triangles
            .iter()
            .zip(&self.geom)
            .map(|(t, g)| {
                let mut exx = F::zero();
                let mut eyy = F::zero();
                let mut gxy = F::zero();
                for i in 0..3 {
                    let u = self.displacement[t.nodes[i]];
                    exx += g.bx[i] * u[0];
                    eyy += g.by[i] * u[1];
                    gxy += g.by[i] * u[0] + g.bx[i] * u[1];
                }
                [
                    self.d11 * exx + self.d12 * eyy,
                    self.d12 * exx + self.d11 * eyy,
                    self.d33 * gxy,
                ]
            })
            .collect()
    }

    fn element_pass(&mut self) {
        let disp = &self.displacement;
        let (d11, d12, d33) = (self.d11, self.d12, self.d33);
        let tris = &self.mesh.triangles;
        let geom = &self.geom;
        self.elem_out
            .par_iter_mut()
            .enumerate()
            .for_each(|(ti, out)| {
                let t = &tris[ti];
                let g = &geom[ti];
                let mut exx = F::zero();
                let mut eyy = F::zero();
                let mut gxy = F::zero();
                for i in 0..3 {
                    let u = disp[t.nodes[i]];
                    exx += g.bx[i] * u[0];
                    eyy += g.by[i] * u[1];
                    gxy += g.by[i] * u[0] + g.bx[i] * u[1];
                }
                let sxx = d11 * exx + d12 * eyy;
                let syy = d12 * exx + d11 * eyy;
                let sxy = d33 * gxy;
                for i in 0..3 {
                    out[i] = [
                        -g.area * (g.bx[i] * sxx + g.by[i] * sxy),
                        -g.area * (g.by[i] * syy + g.bx[i] * sxy),
                    ];
                }
            });
    }

    /// Evaluates one interface integration step: relative-displacement
    /// increments resolved into the local frame, constitutive update, and
    /// equal-and-opposite nodal forces from traction times tributary
    /// length.
    fn iface_eval(&self, fi: usize) -> IfaceStep<F> {
        let f = &self.mesh.interfaces[fi];
        let trib = f.tributary_length();
        let mut out = IfaceStep {
            states: [
                self.interface_states[2 * fi],
                self.interface_states[2 * fi + 1],
            ],
            forces: [[F::zero(); 2]; 4],
            dissipated: F::zero(),
            failed: false,
        };
        for k in 0..2 {
            let na = f.nodes_a[k];
            let nb = f.nodes_b[k];
            let rel = [
                self.displacement[nb][0] - self.displacement[na][0],
                self.displacement[nb][1] - self.displacement[na][1],
            ];
            let u_n = rel[0] * f.normal[0] + rel[1] * f.normal[1];
            let u_s = rel[0] * f.tangent[0] + rel[1] * f.tangent[1];
            let st = &out.states[k];
            match update_interface(st, &self.params, u_n - st.u_n, u_s - st.u_s, 1) {
                Ok((next, r)) => {
                    out.states[k] = next;
                    out.dissipated += r.dissipated * trib;
                    let tvec = [
                        r.sigma_n * f.normal[0] + r.tau * f.tangent[0],
                        r.sigma_n * f.normal[1] + r.tau * f.tangent[1],
                    ];
                    // Tension pulls the faces together.
                    out.forces[k] = [tvec[0] * trib, tvec[1] * trib];
                    out.forces[2 + k] = [-tvec[0] * trib, -tvec[1] * trib];
                }
                Err(_) => out.failed = true,
            }
        }
        out
    }

    /// Assembles element and interface forces into `self.force` without
    /// committing interface states; used by `step` and by diagnostics.
    fn assemble(&mut self) -> Result<(), SolverError> {
        self.element_pass();

        let n_ifaces = self.mesh.interfaces.len();
        let mut staged: Vec<IfaceStep<F>> = Vec::with_capacity(n_ifaces);
        (0..n_ifaces)
            .into_par_iter()
            .map(|fi| self.iface_eval(fi))
            .collect_into_vec(&mut staged);

        if let Some(bad) = staged.iter().position(|s| s.failed) {
            return Err(SolverError::Interface {
                id: bad,
                source: ConstitutiveError::NonFiniteIncrement(f64::NAN, f64::NAN),
            });
        }

        // Fixed-order reduction: elements first, then interfaces.
        for fv in self.force.iter_mut() {
            *fv = [F::zero(); 2];
        }
        for (t, out) in self.mesh.triangles.iter().zip(&self.elem_out) {
            for i in 0..3 {
                let n = t.nodes[i];
                self.force[n][0] += out[i][0];
                self.force[n][1] += out[i][1];
            }
        }
        for (f, out) in self.mesh.interfaces.iter().zip(&staged) {
            for (slot, &n) in f.nodes_a.iter().chain(f.nodes_b.iter()).enumerate() {
                self.force[n][0] += out.forces[slot][0];
                self.force[n][1] += out.forces[slot][1];
            }
        }
        self.iface_out = staged;
        Ok(())
    }

    /// Advances the state by one time step: force assembly, local damping,
    /// velocity and position update, then velocity boundary conditions.
    pub fn step(&mut self) -> Result<(), SolverError> {
        self.assemble()?;

        // Commit the staged interface states and dissipation.
        for (fi, out) in self.iface_out.iter().enumerate() {
            self.interface_states[2 * fi] = out.states[0];
            self.interface_states[2 * fi + 1] = out.states[1];
            self.dissipated += out.dissipated;
        }

        let dt = self.dt;
        let damping = self.cfg.damping;
        let mut finite = true;
        for i in 0..self.displacement.len() {
            let m = self.mass[i];
            for axis in 0..2 {
                let f = self.force[i][axis];
                let v = self.velocity[i][axis];
                let sign = if v > F::zero() {
                    F::one()
                } else if v < F::zero() {
                    -F::one()
                } else {
                    F::zero()
                };
                let fd = f - damping * f.abs() * sign;
                self.velocity[i][axis] = v + fd / m * dt;
            }
        }
        for &(node, axis, vel) in &self.prescribed {
            self.velocity[node][axis] = vel;
        }
        for i in 0..self.displacement.len() {
            for axis in 0..2 {
                self.displacement[i][axis] += self.velocity[i][axis] * dt;
                finite &= self.displacement[i][axis].is_finite();
            }
        }
        self.time += dt;
        self.step_count += 1;
        if !finite {
            return Err(SolverError::NonFinite(self.step_count));
        }
        Ok(())
    }

    /// Total kinetic energy (J per unit thickness).
    pub fn kinetic_energy(&self) -> F {
        let half = scalar::<F>(0.5);
        let mut e = F::zero();
        for (m, v) in self.mass.iter().zip(&self.velocity) {
            e += half * *m * (v[0] * v[0] + v[1] * v[1]);
        }
        e
    }

    /// Elastic strain energy stored in elements and interfaces (J per
    /// unit thickness).
    pub fn strain_energy(&self) -> F {
        let half = scalar::<F>(0.5);
        let mut e = F::zero();
        for (stress, (t, g)) in self
            .element_stresses()
            .iter()
            .zip(self.mesh.triangles.iter().zip(&self.geom))
        {
            let mut exx = F::zero();
            let mut eyy = F::zero();
            let mut gxy = F::zero();
            for i in 0..3 {
                let u = self.displacement[t.nodes[i]];
                exx += g.bx[i] * u[0];
                eyy += g.by[i] * u[1];
                gxy += g.by[i] * u[0] + g.bx[i] * u[1];
            }
            e += half * g.area * (stress[0] * exx + stress[1] * eyy + stress[2] * gxy);
        }
        for (fi, f) in self.mesh.interfaces.iter().enumerate() {
            let trib = f.tributary_length();
            for k in 0..2 {
                let s = &self.interface_states[2 * fi + k];
                e += half * trib * (s.sigma_n * (s.u_n - s.up_n) + s.tau * (s.u_s - s.up_s));
            }
        }
        e
    }

    /// Sum of the assembled force components over a node set; the
    /// negative of the reaction the boundary supplies there.
    pub fn sum_force(&self, nodes: &[usize], axis: usize) -> F {
        nodes.iter().map(|&n| self.force[n][axis]).sum()
    }

    /// Total linear momentum (kg·m/s per unit thickness).
    pub fn momentum(&self) -> [F; 2] {
        let mut p = [F::zero(); 2];
        for (m, v) in self.mass.iter().zip(&self.velocity) {
            p[0] += *m * v[0];
            p[1] += *m * v[1];
        }
        p
    }
}

/// One sampled row of a compression run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionSample<F: Real> {
    pub step: usize,
    pub time: F,
    /// Axial strain, positive in compression (platen travel / height).
    pub strain: F,
    /// Platen stress, positive in compression (Pa).
    pub stress: F,
    /// Interfaces that have accumulated any inelastic history.
    pub yielded: usize,
    /// Interfaces with at least one fully softened integration point.
    pub broken: usize,
    pub kinetic_energy: F,
    pub strain_energy: F,
}

/// Per-interface snapshot row: position, damage and history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow<F: Real> {
    pub id: usize,
    pub x: F,
    pub y: F,
    pub damage: F,
    pub u_ieff: F,
    pub broken: bool,
}

/// Result of a compression experiment.
#[derive(Debug, Clone)]
pub struct CompressionRecord<F: Real> {
    pub samples: Vec<CompressionSample<F>>,
    /// Snapshots taken every `snapshot_interval` steps: (step, rows).
    pub snapshots: Vec<(usize, Vec<SnapshotRow<F>>)>,
    pub peak_stress: F,
    pub peak_strain: F,
    /// Total interface dissipation (J per unit thickness).
    pub dissipated: F,
}

fn snapshot<F: Real>(sim: &Simulation<'_, F>) -> Vec<SnapshotRow<F>> {
    (0..sim.mesh.interfaces.len())
        .map(|fi| {
            let a = &sim.interface_states[2 * fi];
            let b = &sim.interface_states[2 * fi + 1];
            let mid = sim.mesh.interface_midpoint(fi);
            SnapshotRow {
                id: fi,
                x: mid[0],
                y: mid[1],
                damage: a.damage.max(b.damage),
                u_ieff: a.u_ieff.max(b.u_ieff),
                broken: a.broken || b.broken,
            }
        })
        .collect()
}

/// Runs a displacement-controlled uniaxial compression experiment.
///
/// Bottom nodes are fixed vertically (one also horizontally, to remove the
/// rigid mode); top nodes are driven downwards at the configured loading
/// velocity. Terminates at `max_steps` or once the platen stress falls
/// below 30 % of the running peak.
pub fn run_compression<F: Real>(
    mesh: &Mesh<F>,
    params: &MaterialParams<F>,
    cfg: &SolverConfig<F>,
    sample_interval: usize,
    snapshot_interval: usize,
) -> Result<CompressionRecord<F>, SolverError> {
    if sample_interval == 0 {
        return Err(SolverError::BadConfig("sample_interval must be positive"));
    }
    let sets = boundary_sets(mesh);
    let mut sim = Simulation::new(mesh, *params, *cfg)?;
    for &n in &sets.top {
        sim.prescribe(n, 1, -cfg.loading_velocity);
    }
    for &n in &sets.bottom {
        sim.prescribe(n, 1, F::zero());
    }
    // Pin the bottom node closest to the origin against horizontal drift.
    if let Some(&pin) = sets.bottom.iter().min_by(|&&a, &&b| {
        mesh.nodes[a][0].partial_cmp(&mesh.nodes[b][0]).unwrap()
    }) {
        sim.prescribe(pin, 0, F::zero());
    }

    let width = mesh.width;
    let height = mesh.height;
    let mut record = CompressionRecord {
        samples: Vec::new(),
        snapshots: Vec::new(),
        peak_stress: F::zero(),
        peak_strain: F::zero(),
        dissipated: F::zero(),
    };
    let stress_floor = scalar::<F>(1e4);
    let thirty_pct = scalar::<F>(0.3);

    loop {
        sim.step()?;
        let step = sim.step_count;

        if snapshot_interval > 0 && step % snapshot_interval == 0 {
            record.snapshots.push((step, snapshot(&sim)));
        }

        if step % sample_interval == 0 || step >= cfg.max_steps {
            let stress = sim.sum_force(&sets.top, 1) / width;
            let strain = cfg.loading_velocity * sim.time / height;
            let ke = sim.kinetic_energy();
            let se = sim.strain_energy();
            if !stress.is_finite() || !ke.is_finite() {
                return Err(SolverError::NonFinite(step));
            }
            if ke > scalar::<F>(100.0) * (se.abs() + F::one()) {
                return Err(SolverError::Instability {
                    step,
                    kinetic: ke.as_f64(),
                    strain: se.as_f64(),
                });
            }
            let mut yielded = 0usize;
            let mut broken = 0usize;
            for fi in 0..mesh.interfaces.len() {
                let a = &sim.interface_states[2 * fi];
                let b = &sim.interface_states[2 * fi + 1];
                if a.u_ieff > F::zero() || b.u_ieff > F::zero() {
                    yielded += 1;
                }
                if a.broken || b.broken {
                    broken += 1;
                }
            }
            record.samples.push(CompressionSample {
                step,
                time: sim.time,
                strain,
                stress,
                yielded,
                broken,
                kinetic_energy: ke,
                strain_energy: se,
            });
            if stress > record.peak_stress {
                record.peak_stress = stress;
                record.peak_strain = strain;
            }
            let softened = record.peak_stress > stress_floor && stress < thirty_pct * record.peak_stress;
            if softened || step >= cfg.max_steps {
                record.dissipated = sim.dissipated;
                if record.snapshots.last().map(|(s, _)| *s) != Some(step) {
                    record.snapshots.push((step, snapshot(&sim)));
                }
                return Ok(record);
            }
        }
    }
}
