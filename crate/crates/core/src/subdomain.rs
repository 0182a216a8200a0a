//! Backward-Euler time sweeps for the two subproblems.
//!
//! The fluid solves one saddle-point system per slab,
//! `[rho_f/dt M + 2 nu_f A + alpha_f M_G, -B^T; -B, 0]`, and the structure one
//! symmetric positive-definite system per slab in the displacement rate after
//! eliminating the displacement through `eta^n = eta^{n-1} + dt etadot^n`.
//! Each slab matrix is factorized once per sweep configuration and reused
//! across all slabs and all outer iterations.
//!
//! Interface data lives in the multiplier space: the interface trace of the
//! test spaces, which drops any interface node that is Dirichlet-constrained
//! in either subdomain. Exchanged velocity and rate traces are L2(Gamma)
//! projections onto that space, and the interface normal stress is recovered
//! variationally from the interior weak residual. With these choices the
//! discrete Robin identities hold exactly in the multiplier coefficients and
//! the waveform-relaxation energy estimate telescopes without remainder.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::{
    add_boundary_load, add_interface_load, add_interface_mass, assemble_form, assemble_load,
    assemble_trace_mass, constrained_system_dofs, dirichlet_values, eliminate_dirichlet,
    lift_dirichlet_rhs, FeSpace, FormKind,
};
use crate::linalg::{Csr, SparseLu, TripletBuilder};
use crate::mesh::BoundaryTag;
use crate::scalar::{axpy, lit, Real};
use crate::timegrid::{TimeGrid, TraceSeries};

/// Physical constants of the coupled system (CGS units in the experiments).
#[derive(Debug, Clone, Copy)]
pub struct MaterialParams<T> {
    /// Fluid density.
    pub rho_f: T,
    /// Fluid viscosity.
    pub nu_f: T,
    /// Structure density.
    pub rho_s: T,
    /// First Lame constant (shear).
    pub nu_s: T,
    /// Second Lame constant (compressibility).
    pub lambda: T,
    /// Robin weight on the fluid side.
    pub alpha_f: T,
    /// Robin weight on the structure side.
    pub alpha_s: T,
}

impl<T: Real> MaterialParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_f > T::zero() && self.nu_f > T::zero() && self.rho_s > T::zero()) {
            return Err(Error::Config("densities and viscosity must be positive".into()));
        }
        if !(self.nu_s > T::zero() && self.lambda > T::zero()) {
            return Err(Error::Config("Lame parameters must be positive".into()));
        }
        if self.alpha_f < T::zero() || self.alpha_s < T::zero() {
            return Err(Error::Config("Robin weights must be nonnegative".into()));
        }
        Ok(())
    }
}

/// How interface data couples into a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Prescribed normal stress on the interface.
    Neumann,
    /// Robin combination `alpha v + sigma n` with the subdomain's own weight.
    Robin,
}

/// Interface data for one sweep: a trace series on the sweeping subdomain's
/// own grid, valued in the multiplier space.
#[derive(Debug, Clone)]
pub struct InterfaceData<T> {
    pub mode: CouplingMode,
    pub series: TraceSeries<T>,
}

impl<T: Real> InterfaceData<T> {
    pub fn zero(mode: CouplingMode, grid: Arc<TimeGrid<T>>, dim: usize) -> Self {
        InterfaceData {
            mode,
            series: TraceSeries::zeros(grid, dim),
        }
    }
}

/// Per-slab fluid states.
#[derive(Debug, Clone)]
pub struct FluidHistory<T> {
    pub grid: Arc<TimeGrid<T>>,
    pub initial_velocity: Vec<T>,
    pub velocity: Vec<Vec<T>>,
    pub pressure: Vec<Vec<T>>,
}

/// Per-slab structure states.
#[derive(Debug, Clone)]
pub struct StructureHistory<T> {
    pub grid: Arc<TimeGrid<T>>,
    pub initial_displacement: Vec<T>,
    pub initial_rate: Vec<T>,
    pub displacement: Vec<Vec<T>>,
    pub rate: Vec<Vec<T>>,
}

/// Output of a fluid sweep.
pub struct FluidSweep<T> {
    pub history: FluidHistory<T>,
    /// L2(Gamma) projection of the velocity trace onto the multiplier space.
    pub trace_velocity: TraceSeries<T>,
    /// Variationally recovered `sigma_f n_f`.
    pub trace_stress: TraceSeries<T>,
}

/// Output of a structure sweep.
pub struct StructureSweep<T> {
    pub history: StructureHistory<T>,
    /// L2(Gamma) projection of the displacement-rate trace.
    pub trace_rate: TraceSeries<T>,
    /// Variationally recovered `sigma_s n_s`.
    pub trace_stress: TraceSeries<T>,
}

/// Owned field closure `(x, y, t) -> components`, shareable across sweeps.
pub type FieldFn<T> = dyn Fn(T, T, T) -> [T; 2] + Send + Sync;

/// Borrowed field closure accepted by the sweep entry points.
pub type FieldRef<'a, T> = &'a (dyn Fn(T, T, T) -> [T; 2] + Send + Sync);

/// Trace positions (into `FeSpace::trace_nodes`) that are free of the given
/// Dirichlet tags and therefore carry multiplier DOFs.
pub fn own_active_trace<T: Real>(space: &FeSpace<T>, dirichlet_tags: &[BoundaryTag]) -> Vec<usize> {
    let mut constrained = std::collections::BTreeSet::new();
    for &tag in dirichlet_tags {
        constrained.extend(space.boundary_scalar_dofs(tag).iter().copied());
    }
    (0..space.trace_nodes().len())
        .filter(|&k| !constrained.contains(&space.trace_nodes()[k]))
        .collect()
}

/// The multiplier space shared by the two subdomains: interface nodes that
/// neither side constrains. Positions refer to the (matching) arclength
/// ordering of both trace node lists.
pub fn shared_active_trace<T: Real>(
    fluid_space: &FeSpace<T>,
    fluid_tags: &[BoundaryTag],
    structure_space: &FeSpace<T>,
    structure_tags: &[BoundaryTag],
) -> Result<Vec<usize>> {
    if fluid_space.trace_nodes().len() != structure_space.trace_nodes().len() {
        return Err(Error::InterfaceMismatch(format!(
            "interface trace node counts differ: {} vs {}",
            fluid_space.trace_nodes().len(),
            structure_space.trace_nodes().len()
        )));
    }
    let a = own_active_trace(fluid_space, fluid_tags);
    let b = own_active_trace(structure_space, structure_tags);
    let bset: std::collections::BTreeSet<usize> = b.into_iter().collect();
    Ok(a.into_iter().filter(|k| bset.contains(k)).collect())
}

/// Multiplier-space machinery of one subdomain: the full interface trace
/// mass, its restriction to the active nodes, and the projections between
/// the two representations.
struct MultiplierSpace<T> {
    active: Vec<usize>,
    mass_full: Csr<T>,
    mass: Csr<T>,
    mass_lu: SparseLu<T>,
    vdim: usize,
    n_full: usize,
}

impl<T: Real> MultiplierSpace<T> {
    fn new(space: &FeSpace<T>, active: Vec<usize>) -> Result<Self> {
        let mass_full = assemble_trace_mass(space)?;
        let n_full = space.trace_nodes().len();
        if active.is_empty() || active.iter().any(|&k| k >= n_full) {
            return Err(Error::InterfaceMismatch(
                "multiplier space has no active interface nodes".into(),
            ));
        }
        // Galerkin restriction of the trace mass to the active nodes
        let mut b = TripletBuilder::new(active.len(), active.len());
        let index_of: std::collections::BTreeMap<usize, usize> =
            active.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        for (i, j, v) in mass_full.iter() {
            if let (Some(&ri), Some(&rj)) = (index_of.get(&i), index_of.get(&j)) {
                b.push(ri, rj, v);
            }
        }
        let mass = b.build();
        let mass_lu = SparseLu::factorize(&mass, "interface multiplier mass")?;
        Ok(MultiplierSpace {
            active,
            mass_full,
            mass,
            mass_lu,
            vdim: space.vdim(),
            n_full,
        })
    }

    fn dim(&self) -> usize {
        self.active.len() * self.vdim
    }

    /// Embeds multiplier coefficients into the full trace-node layout
    /// (zeros at excluded nodes).
    fn embed(&self, reduced: &[T]) -> Vec<T> {
        assert_eq!(reduced.len(), self.dim());
        let mut full = vec![T::zero(); self.n_full * self.vdim];
        for (k, &pos) in self.active.iter().enumerate() {
            for c in 0..self.vdim {
                full[pos * self.vdim + c] = reduced[k * self.vdim + c];
            }
        }
        full
    }

    /// Accumulates `scale * (d, v)_Gamma` into a system vector for multiplier
    /// data `d`.
    fn load_into(&self, space: &FeSpace<T>, reduced: &[T], scale: T, out: &mut [T]) {
        let full = self.embed(reduced);
        add_interface_load(space, &self.mass_full, &full, scale, out);
    }

    /// L2(Gamma) projection of a field's interface trace onto the multiplier
    /// space: solves `M_red w = (M_full trace)_active` per component.
    fn project_trace(&self, space: &FeSpace<T>, coeffs: &[T]) -> Vec<T> {
        let full = space.trace_of(coeffs);
        let mut out = vec![T::zero(); self.dim()];
        for c in 0..self.vdim {
            let comp: Vec<T> = (0..self.n_full).map(|k| full[k * self.vdim + c]).collect();
            let weighted = self.mass_full.mul_vec(&comp);
            let rhs: Vec<T> = self.active.iter().map(|&k| weighted[k]).collect();
            let sol = self.mass_lu.solve(&rhs);
            for (k, &v) in sol.iter().enumerate() {
                out[k * self.vdim + c] = v;
            }
        }
        out
    }

    /// Consistent-flux recovery: solves `M_red sigma = residual_active` per
    /// component, where `residual` is the interior weak residual on the
    /// system DOFs.
    fn recover_stress(&self, space: &FeSpace<T>, residual: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for c in 0..self.vdim {
            let rhs: Vec<T> = self
                .active
                .iter()
                .map(|&k| residual[space.system_dof(space.trace_nodes()[k], c)])
                .collect();
            let sol = self.mass_lu.solve(&rhs);
            for (k, &v) in sol.iter().enumerate() {
                out[k * self.vdim + c] = v;
            }
        }
        out
    }
}

/// One factorized slab system per distinct step size.
struct SlabSystems<T> {
    /// `(dt, raw unconstrained matrix, factorized constrained matrix)`
    buckets: Vec<(T, Csr<T>, SparseLu<T>)>,
    slab_to_bucket: Vec<usize>,
}

impl<T: Real> SlabSystems<T> {
    fn build(
        grid: &TimeGrid<T>,
        constrained: &[usize],
        label: &str,
        mut make_raw: impl FnMut(T) -> Csr<T>,
    ) -> Result<Self> {
        let rel = lit::<T>(1e-12);
        let mut buckets: Vec<(T, Csr<T>, SparseLu<T>)> = Vec::new();
        let mut slab_to_bucket = Vec::with_capacity(grid.n_slabs());
        for m in 0..grid.n_slabs() {
            let dt = grid.dt(m);
            let found = buckets
                .iter()
                .position(|(bdt, _, _)| (*bdt - dt).abs() <= rel * dt.abs());
            let idx = match found {
                Some(i) => i,
                None => {
                    let raw = make_raw(dt);
                    let lu = SparseLu::factorize(&eliminate_dirichlet(&raw, constrained), label)?;
                    buckets.push((dt, raw, lu));
                    buckets.len() - 1
                }
            };
            slab_to_bucket.push(idx);
        }
        Ok(SlabSystems {
            buckets,
            slab_to_bucket,
        })
    }

    fn of_slab(&self, m: usize) -> (T, &Csr<T>, &SparseLu<T>) {
        let (dt, raw, lu) = &self.buckets[self.slab_to_bucket[m]];
        (*dt, raw, lu)
    }
}

/// Quadrature degree used for volume forcing terms.
const LOAD_DEGREE: usize = 5;

/// Time sweep driver for the Stokes subdomain.
pub struct FluidSolver<T> {
    space_v: Arc<FeSpace<T>>,
    space_p: Arc<FeSpace<T>>,
    params: MaterialParams<T>,
    mode: CouplingMode,
    grid: Arc<TimeGrid<T>>,
    dirichlet_tags: Vec<BoundaryTag>,
    mass: Csr<T>,
    strain: Csr<T>,
    div: Csr<T>,
    multiplier: MultiplierSpace<T>,
    systems: SlabSystems<T>,
    constrained: Vec<usize>,
    n_u: usize,
    n_p: usize,
}

impl<T: Real> FluidSolver<T> {
    /// Builds the solver. `active_trace` lists the interface node positions
    /// carrying multiplier DOFs (see [`shared_active_trace`]).
    pub fn new(
        space_v: Arc<FeSpace<T>>,
        space_p: Arc<FeSpace<T>>,
        params: MaterialParams<T>,
        mode: CouplingMode,
        grid: Arc<TimeGrid<T>>,
        dirichlet_tags: Vec<BoundaryTag>,
        active_trace: Vec<usize>,
    ) -> Result<Self> {
        params.validate()?;
        let alpha = match mode {
            CouplingMode::Robin => params.alpha_f,
            CouplingMode::Neumann => T::zero(),
        };
        let two = lit::<T>(2.0);
        let mass = assemble_form(&space_v, &space_v, FormKind::Mass, T::one())?;
        let strain = assemble_form(&space_v, &space_v, FormKind::Strain, two * params.nu_f)?;
        let div = assemble_form(&space_v, &space_p, FormKind::Div, T::one())?;
        let multiplier = MultiplierSpace::new(&space_v, active_trace)?;

        let n_u = space_v.n_dofs();
        let n_p = space_p.n_dofs();
        let constrained = constrained_system_dofs(&space_v, &dirichlet_tags, 0);

        let div_t = div.transpose();
        let systems = SlabSystems::build(&grid, &constrained, "fluid slab matrix", |dt| {
            let mut b = TripletBuilder::new(n_u + n_p, n_u + n_p);
            b.push_block(0, 0, params.rho_f / dt, &mass);
            b.push_block(0, 0, T::one(), &strain);
            add_interface_mass(&space_v, &multiplier.mass_full, alpha, 0, &mut b);
            b.push_block(0, n_u, -T::one(), &div_t);
            b.push_block(n_u, 0, -T::one(), &div);
            b.build()
        })?;

        Ok(FluidSolver {
            space_v,
            space_p,
            params,
            mode,
            grid,
            dirichlet_tags,
            mass,
            strain,
            div,
            multiplier,
            systems,
            constrained,
            n_u,
            n_p,
        })
    }

    pub fn space_v(&self) -> &Arc<FeSpace<T>> {
        &self.space_v
    }

    pub fn space_p(&self) -> &Arc<FeSpace<T>> {
        &self.space_p
    }

    pub fn params(&self) -> &MaterialParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &Arc<TimeGrid<T>> {
        &self.grid
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    pub fn dirichlet_tags(&self) -> &[BoundaryTag] {
        &self.dirichlet_tags
    }

    /// Dimension of the multiplier space (all components).
    pub fn trace_dim(&self) -> usize {
        self.multiplier.dim()
    }

    /// Mass matrix of the multiplier space (active nodes only).
    pub fn trace_mass(&self) -> &Csr<T> {
        &self.multiplier.mass
    }

    /// Active interface node positions (into the arclength trace ordering).
    pub fn active_trace(&self) -> &[usize] {
        &self.multiplier.active
    }

    /// Coordinates of the active interface nodes.
    pub fn active_trace_coords(&self) -> Vec<[T; 2]> {
        self.multiplier
            .active
            .iter()
            .map(|&k| self.space_v.dof_coord(self.space_v.trace_nodes()[k]))
            .collect()
    }

    pub fn div_form(&self) -> &Csr<T> {
        &self.div
    }

    /// Perturbs one entry of the assembled strain operator and refactorizes
    /// the slab systems; only the verification fault injector uses this.
    pub fn perturb_strain_entry(&mut self, row: usize, col: usize, delta: T) -> Result<()> {
        self.strain.perturb(row, col, delta);
        for (_, raw, lu) in self.systems.buckets.iter_mut() {
            raw.perturb(row, col, delta);
            *lu = SparseLu::factorize(
                &eliminate_dirichlet(raw, &self.constrained),
                "fluid slab matrix",
            )?;
        }
        Ok(())
    }

    /// Runs the backward-Euler sweep over all slabs.
    ///
    /// `data` is the interface series on this solver's grid (multiplier
    /// coefficients per slab); `forcing` the body force; `dirichlet` the
    /// boundary values on the Dirichlet tags; `neumann` extra prescribed
    /// tractions; `u0` the initial velocity coefficients.
    pub fn sweep(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        neumann: &[(BoundaryTag, FieldRef<'_, T>)],
        u0: &[T],
    ) -> Result<FluidSweep<T>> {
        self.sweep_impl(data, forcing, dirichlet, neumann, u0, true)
    }

    /// Like [`FluidSolver::sweep`] but skips the stress recovery; the
    /// interface operators only consume the velocity traces.
    pub(crate) fn sweep_without_stress(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        neumann: &[(BoundaryTag, FieldRef<'_, T>)],
        u0: &[T],
    ) -> Result<FluidSweep<T>> {
        self.sweep_impl(data, forcing, dirichlet, neumann, u0, false)
    }

    fn sweep_impl(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        neumann: &[(BoundaryTag, FieldRef<'_, T>)],
        u0: &[T],
        compute_stress: bool,
    ) -> Result<FluidSweep<T>> {
        if data.mode != self.mode {
            return Err(Error::Config("interface data mode does not match solver".into()));
        }
        if data.series.grid().times() != self.grid.times() {
            return Err(Error::Config("interface data grid does not match sweep grid".into()));
        }
        assert_eq!(u0.len(), self.n_u, "initial velocity length mismatch");

        let m_slabs = self.grid.n_slabs();
        let mut velocity = Vec::with_capacity(m_slabs);
        let mut pressure = Vec::with_capacity(m_slabs);
        let mut trace_velocity = Vec::with_capacity(m_slabs);
        let mut trace_stress = Vec::with_capacity(m_slabs);
        let mut u_prev: Vec<T> = u0.to_vec();

        for m in 0..m_slabs {
            let (dt, raw, lu) = self.systems.of_slab(m);
            let t_end = self.grid.slab(m).1;
            let scale = self.params.rho_f / dt;

            // external load (kept separate: the stress recovery subtracts it)
            let mut ext = match forcing {
                Some(f) => assemble_load(&self.space_v, f, t_end, LOAD_DEGREE),
                None => vec![T::zero(); self.n_u],
            };
            for (tag, g) in neumann {
                add_boundary_load(&self.space_v, *tag, *g, t_end, &mut ext);
            }

            let mut rhs = vec![T::zero(); self.n_u + self.n_p];
            rhs[..self.n_u].copy_from_slice(&ext);
            self.multiplier.load_into(
                &self.space_v,
                data.series.slab_value(m),
                T::one(),
                &mut rhs[..self.n_u],
            );
            let m_uprev = self.mass.mul_vec(&u_prev);
            axpy(scale, &m_uprev, &mut rhs[..self.n_u]);

            let values = match dirichlet {
                Some(bc) => dirichlet_values(&self.space_v, &self.constrained, 0, bc, t_end),
                None => vec![T::zero(); self.constrained.len()],
            };
            lift_dirichlet_rhs(raw, &mut rhs, &self.constrained, &values);

            let sol = lu.solve(&rhs);
            let u = sol[..self.n_u].to_vec();
            let p = sol[self.n_u..].to_vec();

            if compute_stress {
                // interior weak residual for the consistent flux:
                // rho/dt M (u - u_prev) + A u - B^T p - ext
                let mut residual = self.strain.mul_vec(&u);
                let mu = self.mass.mul_vec(&u);
                let btp = self.div.mul_transpose_vec(&p);
                for i in 0..self.n_u {
                    residual[i] = residual[i] + scale * (mu[i] - m_uprev[i]) - btp[i] - ext[i];
                }
                trace_stress.push(self.multiplier.recover_stress(&self.space_v, &residual));
            } else {
                trace_stress.push(vec![T::zero(); self.multiplier.dim()]);
            }
            trace_velocity.push(self.multiplier.project_trace(&self.space_v, &u));
            velocity.push(u);
            pressure.push(p);
            u_prev = velocity.last().unwrap().clone();
        }

        let history = FluidHistory {
            grid: self.grid.clone(),
            initial_velocity: u0.to_vec(),
            velocity,
            pressure,
        };
        Ok(FluidSweep {
            history,
            trace_velocity: TraceSeries::new(self.grid.clone(), trace_velocity),
            trace_stress: TraceSeries::new(self.grid.clone(), trace_stress),
        })
    }
}

/// Time sweep driver for the elastodynamics subdomain. The unknown per slab
/// is the displacement rate; the displacement is reconstructed from the
/// kinematic relation, which therefore holds exactly.
pub struct StructureSolver<T> {
    space: Arc<FeSpace<T>>,
    params: MaterialParams<T>,
    mode: CouplingMode,
    grid: Arc<TimeGrid<T>>,
    dirichlet_tags: Vec<BoundaryTag>,
    mass: Csr<T>,
    /// `2 nu_s (D, D) + lambda (div, div)`
    stiffness: Csr<T>,
    multiplier: MultiplierSpace<T>,
    systems: SlabSystems<T>,
    constrained: Vec<usize>,
    n: usize,
}

impl<T: Real> StructureSolver<T> {
    pub fn new(
        space: Arc<FeSpace<T>>,
        params: MaterialParams<T>,
        mode: CouplingMode,
        grid: Arc<TimeGrid<T>>,
        dirichlet_tags: Vec<BoundaryTag>,
        active_trace: Vec<usize>,
    ) -> Result<Self> {
        params.validate()?;
        let alpha = match mode {
            CouplingMode::Robin => params.alpha_s,
            CouplingMode::Neumann => T::zero(),
        };
        let two = lit::<T>(2.0);
        let mass = assemble_form(&space, &space, FormKind::Mass, T::one())?;
        let strain = assemble_form(&space, &space, FormKind::Strain, two * params.nu_s)?;
        let divdiv = assemble_form(&space, &space, FormKind::DivDiv, params.lambda)?;
        let stiffness = {
            let mut b = TripletBuilder::new(space.n_dofs(), space.n_dofs());
            b.push_block(0, 0, T::one(), &strain);
            b.push_block(0, 0, T::one(), &divdiv);
            b.build()
        };
        let multiplier = MultiplierSpace::new(&space, active_trace)?;

        let n = space.n_dofs();
        let constrained = constrained_system_dofs(&space, &dirichlet_tags, 0);

        let systems = SlabSystems::build(&grid, &constrained, "structure slab matrix", |dt| {
            let mut b = TripletBuilder::new(n, n);
            b.push_block(0, 0, params.rho_s / dt, &mass);
            b.push_block(0, 0, dt, &stiffness);
            add_interface_mass(&space, &multiplier.mass_full, alpha, 0, &mut b);
            b.build()
        })?;

        Ok(StructureSolver {
            space,
            params,
            mode,
            grid,
            dirichlet_tags,
            mass,
            stiffness,
            multiplier,
            systems,
            constrained,
            n,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace<T>> {
        &self.space
    }

    pub fn params(&self) -> &MaterialParams<T> {
        &self.params
    }

    pub fn grid(&self) -> &Arc<TimeGrid<T>> {
        &self.grid
    }

    pub fn mode(&self) -> CouplingMode {
        self.mode
    }

    pub fn dirichlet_tags(&self) -> &[BoundaryTag] {
        &self.dirichlet_tags
    }

    pub fn trace_dim(&self) -> usize {
        self.multiplier.dim()
    }

    pub fn trace_mass(&self) -> &Csr<T> {
        &self.multiplier.mass
    }

    pub fn active_trace(&self) -> &[usize] {
        &self.multiplier.active
    }

    pub fn active_trace_coords(&self) -> Vec<[T; 2]> {
        self.multiplier
            .active
            .iter()
            .map(|&k| self.space.dof_coord(self.space.trace_nodes()[k]))
            .collect()
    }

    /// Scalar trace node index (into the space's trace list) of an active
    /// multiplier position.
    pub fn trace_node_of_active(&self, k: usize) -> usize {
        self.space.trace_nodes()[self.multiplier.active[k]]
    }

    /// Runs the backward-Euler sweep over all slabs.
    ///
    /// `dirichlet` prescribes the displacement on the Dirichlet tags; the
    /// rate unknown is constrained to `(eta_bc(t^n) - eta^{n-1}) / dt` so the
    /// reconstructed displacement interpolates the boundary data exactly.
    pub fn sweep(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        eta0: &[T],
        rate0: &[T],
    ) -> Result<StructureSweep<T>> {
        self.sweep_impl(data, forcing, dirichlet, eta0, rate0, true)
    }

    /// Like [`StructureSolver::sweep`] but skips the stress recovery.
    pub(crate) fn sweep_without_stress(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        eta0: &[T],
        rate0: &[T],
    ) -> Result<StructureSweep<T>> {
        self.sweep_impl(data, forcing, dirichlet, eta0, rate0, false)
    }

    fn sweep_impl(
        &self,
        data: &InterfaceData<T>,
        forcing: Option<FieldRef<'_, T>>,
        dirichlet: Option<FieldRef<'_, T>>,
        eta0: &[T],
        rate0: &[T],
        compute_stress: bool,
    ) -> Result<StructureSweep<T>> {
        if data.mode != self.mode {
            return Err(Error::Config("interface data mode does not match solver".into()));
        }
        if data.series.grid().times() != self.grid.times() {
            return Err(Error::Config("interface data grid does not match sweep grid".into()));
        }
        assert_eq!(eta0.len(), self.n);
        assert_eq!(rate0.len(), self.n);

        // Robin data enters with a minus sign; prescribed traction with plus.
        let data_sign = match self.mode {
            CouplingMode::Robin => -T::one(),
            CouplingMode::Neumann => T::one(),
        };

        let m_slabs = self.grid.n_slabs();
        let mut displacement = Vec::with_capacity(m_slabs);
        let mut rate = Vec::with_capacity(m_slabs);
        let mut trace_rate = Vec::with_capacity(m_slabs);
        let mut trace_stress = Vec::with_capacity(m_slabs);
        let mut eta_prev = eta0.to_vec();
        let mut rate_prev = rate0.to_vec();

        for nstep in 0..m_slabs {
            let (dt, raw, lu) = self.systems.of_slab(nstep);
            let t_end = self.grid.slab(nstep).1;
            let scale = self.params.rho_s / dt;

            let ext = match forcing {
                Some(f) => assemble_load(&self.space, f, t_end, LOAD_DEGREE),
                None => vec![T::zero(); self.n],
            };

            let mut rhs = ext.clone();
            self.multiplier.load_into(
                &self.space,
                data.series.slab_value(nstep),
                data_sign,
                &mut rhs,
            );
            let m_rate_prev = self.mass.mul_vec(&rate_prev);
            axpy(scale, &m_rate_prev, &mut rhs);
            let k_eta_prev = self.stiffness.mul_vec(&eta_prev);
            axpy(-T::one(), &k_eta_prev, &mut rhs);

            let values = match dirichlet {
                Some(bc) => {
                    let eta_bc = dirichlet_values(&self.space, &self.constrained, 0, bc, t_end);
                    eta_bc
                        .iter()
                        .zip(self.constrained.iter())
                        .map(|(&v, &dof)| (v - eta_prev[dof]) / dt)
                        .collect()
                }
                None => vec![T::zero(); self.constrained.len()],
            };
            lift_dirichlet_rhs(raw, &mut rhs, &self.constrained, &values);

            let rate_n = lu.solve(&rhs);
            let eta_n: Vec<T> = eta_prev
                .iter()
                .zip(&rate_n)
                .map(|(&e, &r)| e + dt * r)
                .collect();

            if compute_stress {
                // interior weak residual:
                // rho/dt M (rate - rate_prev) + K eta - ext
                let mut residual = self.stiffness.mul_vec(&eta_n);
                let m_rate = self.mass.mul_vec(&rate_n);
                for i in 0..self.n {
                    residual[i] = residual[i] + scale * (m_rate[i] - m_rate_prev[i]) - ext[i];
                }
                trace_stress.push(self.multiplier.recover_stress(&self.space, &residual));
            } else {
                trace_stress.push(vec![T::zero(); self.multiplier.dim()]);
            }
            trace_rate.push(self.multiplier.project_trace(&self.space, &rate_n));
            displacement.push(eta_n.clone());
            rate.push(rate_n.clone());
            eta_prev = eta_n;
            rate_prev = rate_n;
        }

        let history = StructureHistory {
            grid: self.grid.clone(),
            initial_displacement: eta0.to_vec(),
            initial_rate: rate0.to_vec(),
            displacement,
            rate,
        };
        Ok(StructureSweep {
            history,
            trace_rate: TraceSeries::new(self.grid.clone(), trace_rate),
            trace_stress: TraceSeries::new(self.grid.clone(), trace_stress),
        })
    }
}
