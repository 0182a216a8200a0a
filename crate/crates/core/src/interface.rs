//! The two global-in-time interface problems.
//!
//! Both reformulate the coupled system as a linear problem on space-time
//! interface vectors and never form a coupled matrix: every operator
//! application runs one independent time sweep per subdomain and exchanges
//! traces through the grid projections.
//!
//! Steklov-Poincare: the unknown is the common interface traction `g`, a
//! trace series on the fluid grid. Applying the operator runs both sweeps
//! with traction data (`+g` fluid, `-g` structure) and zero forcing and
//! initial data, and returns the velocity mismatch
//! `u(g) - P_fs(etadot(g))`.
//!
//! Robin: the unknowns are the two Robin data series `(g_f, g_s)` on their
//! own grids. The operator returns
//! `[g_f - P_fs(g_s + (a_f + a_s) etadot(g_s)); g_s - P_sf(g_f - (a_f + a_s) u(g_f))]`.
//!
//! The same fixed point drives the Schwarz waveform relaxation: a Jacobi
//! iteration whose per-step data are the previous sweep's traces, with the
//! interface energy of each iterate recorded for the decay diagnostics.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::gmres::{gmres, KrylovReport};
use crate::linalg::sparse::Csr;
use crate::mesh::BoundaryTag;
use crate::scalar::{join2, lit, norm2, Real};
use crate::subdomain::{
    CouplingMode, FieldFn, FieldRef, FluidSolver, FluidSweep, InterfaceData, StructureSolver,
    StructureSweep,
};
use crate::timegrid::{project, TimeGrid, TraceSeries};

/// Unknown of an interface problem.
#[derive(Debug, Clone)]
pub enum InterfaceVector<T> {
    /// Common traction on the fluid grid.
    Sp(TraceSeries<T>),
    /// Robin data pair, each on its own grid; flattening puts the fluid
    /// block first (slab-major, trace-DOF minor).
    Robin {
        g_f: TraceSeries<T>,
        g_s: TraceSeries<T>,
    },
}

impl<T: Real> InterfaceVector<T> {
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::new();
        match self {
            InterfaceVector::Sp(g) => g.flatten_into(&mut out),
            InterfaceVector::Robin { g_f, g_s } => {
                g_f.flatten_into(&mut out);
                g_s.flatten_into(&mut out);
            }
        }
        out
    }

    /// Rebuilds a vector with the same shape as `self` from flat storage.
    pub fn unflatten_like(&self, flat: &[T]) -> InterfaceVector<T> {
        match self {
            InterfaceVector::Sp(g) => {
                assert_eq!(flat.len(), g.flat_len());
                InterfaceVector::Sp(TraceSeries::from_flat(g.grid().clone(), g.dim(), flat))
            }
            InterfaceVector::Robin { g_f, g_s } => {
                let nf = g_f.flat_len();
                assert_eq!(flat.len(), nf + g_s.flat_len());
                InterfaceVector::Robin {
                    g_f: TraceSeries::from_flat(g_f.grid().clone(), g_f.dim(), &flat[..nf]),
                    g_s: TraceSeries::from_flat(g_s.grid().clone(), g_s.dim(), &flat[nf..]),
                }
            }
        }
    }
}

/// Convergence record of a waveform-relaxation run.
#[derive(Debug, Clone)]
pub struct SwrReport<T> {
    /// Relative update of the flattened interface vector per iteration.
    pub update_norms: Vec<T>,
    /// Interface energy `B^k` per iteration.
    pub energy: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Which interface problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SteklovPoincare,
    RobinGmres,
}

/// Problem data shared by the right-hand-side sweeps and the finalization.
pub struct ProblemData<T> {
    pub fluid_forcing: Option<Box<FieldFn<T>>>,
    pub fluid_dirichlet: Option<Box<FieldFn<T>>>,
    pub fluid_neumann: Vec<(BoundaryTag, Box<FieldFn<T>>)>,
    pub structure_forcing: Option<Box<FieldFn<T>>>,
    pub structure_dirichlet: Option<Box<FieldFn<T>>>,
    pub initial_velocity: Vec<T>,
    pub initial_displacement: Vec<T>,
    pub initial_rate: Vec<T>,
}

impl<T: Real> ProblemData<T> {
    /// Homogeneous data of matching sizes.
    pub fn zero(n_u: usize, n_eta: usize) -> Self {
        ProblemData {
            fluid_forcing: None,
            fluid_dirichlet: None,
            fluid_neumann: Vec::new(),
            structure_forcing: None,
            structure_dirichlet: None,
            initial_velocity: vec![T::zero(); n_u],
            initial_displacement: vec![T::zero(); n_eta],
            initial_rate: vec![T::zero(); n_eta],
        }
    }
}

/// The coupled problem: two subdomain solvers plus the shared data.
pub struct CoupledProblem<T> {
    pub fluid: FluidSolver<T>,
    pub structure: StructureSolver<T>,
    pub data: ProblemData<T>,
    alpha_f: T,
    alpha_s: T,
}

impl<T: Real> CoupledProblem<T> {
    pub fn new(
        fluid: FluidSolver<T>,
        structure: StructureSolver<T>,
        data: ProblemData<T>,
    ) -> Result<Self> {
        if fluid.mode() != structure.mode() {
            return Err(Error::Config("subdomain solvers disagree on coupling mode".into()));
        }
        if fluid.trace_dim() != structure.trace_dim() {
            return Err(Error::InterfaceMismatch(format!(
                "trace spaces differ: fluid {} vs structure {}",
                fluid.trace_dim(),
                structure.trace_dim()
            )));
        }
        // the active interface DOF orderings must coincide geometrically
        let tol = lit::<T>(1e-10) * fluid.space_v().mesh().diameter();
        for (pa, pb) in fluid
            .active_trace_coords()
            .into_iter()
            .zip(structure.active_trace_coords())
        {
            let d = ((pa[0] - pb[0]) * (pa[0] - pb[0]) + (pa[1] - pb[1]) * (pa[1] - pb[1])).sqrt();
            if !(d <= tol) {
                return Err(Error::InterfaceMismatch(
                    "active interface nodes of the two spaces do not coincide".into(),
                ));
            }
        }
        if data.initial_velocity.len() != fluid.space_v().n_dofs()
            || data.initial_displacement.len() != structure.space().n_dofs()
            || data.initial_rate.len() != structure.space().n_dofs()
        {
            return Err(Error::Config("initial data sizes do not match the spaces".into()));
        }
        let params = fluid.params();
        Ok(CoupledProblem {
            alpha_f: params.alpha_f,
            alpha_s: params.alpha_s,
            fluid,
            structure,
            data,
        })
    }

    pub fn fluid_grid(&self) -> &Arc<TimeGrid<T>> {
        self.fluid.grid()
    }

    pub fn structure_grid(&self) -> &Arc<TimeGrid<T>> {
        self.structure.grid()
    }

    pub fn trace_dim(&self) -> usize {
        self.fluid.trace_dim()
    }

    /// Zero unknown of the given method's shape.
    pub fn zero_vector(&self, method: Method) -> InterfaceVector<T> {
        match method {
            Method::SteklovPoincare => InterfaceVector::Sp(TraceSeries::zeros(
                self.fluid_grid().clone(),
                self.trace_dim(),
            )),
            Method::RobinGmres => InterfaceVector::Robin {
                g_f: TraceSeries::zeros(self.fluid_grid().clone(), self.trace_dim()),
                g_s: TraceSeries::zeros(self.structure_grid().clone(), self.trace_dim()),
            },
        }
    }

    fn fluid_sweep_operator(&self, series: &TraceSeries<T>) -> Result<FluidSweep<T>> {
        let zero_u = vec![T::zero(); self.fluid.space_v().n_dofs()];
        self.fluid.sweep_without_stress(
            &InterfaceData {
                mode: self.fluid.mode(),
                series: series.clone(),
            },
            None,
            None,
            &[],
            &zero_u,
        )
    }

    fn structure_sweep_operator(&self, series: &TraceSeries<T>) -> Result<StructureSweep<T>> {
        let zero = vec![T::zero(); self.structure.space().n_dofs()];
        self.structure.sweep_without_stress(
            &InterfaceData {
                mode: self.structure.mode(),
                series: series.clone(),
            },
            None,
            None,
            &zero,
            &zero,
        )
    }

    fn fluid_sweep_full(&self, series: &TraceSeries<T>) -> Result<FluidSweep<T>> {
        let neumann: Vec<(BoundaryTag, FieldRef<'_, T>)> = self
            .data
            .fluid_neumann
            .iter()
            .map(|(tag, f)| (*tag, &**f as FieldRef<'_, T>))
            .collect();
        self.fluid.sweep(
            &InterfaceData {
                mode: self.fluid.mode(),
                series: series.clone(),
            },
            self.data.fluid_forcing.as_deref(),
            self.data.fluid_dirichlet.as_deref(),
            &neumann,
            &self.data.initial_velocity,
        )
    }

    fn structure_sweep_full(&self, series: &TraceSeries<T>) -> Result<StructureSweep<T>> {
        self.structure.sweep(
            &InterfaceData {
                mode: self.structure.mode(),
                series: series.clone(),
            },
            self.data.structure_forcing.as_deref(),
            self.data.structure_dirichlet.as_deref(),
            &self.data.initial_displacement,
            &self.data.initial_rate,
        )
    }

    /// Applies the Robin interface operator `S_R`.
    pub fn apply_robin(&self, z: &InterfaceVector<T>) -> Result<InterfaceVector<T>> {
        let (g_f, g_s) = match z {
            InterfaceVector::Robin { g_f, g_s } => (g_f, g_s),
            InterfaceVector::Sp(_) => {
                return Err(Error::Config("Robin operator needs a Robin vector".into()))
            }
        };
        self.require_mode(CouplingMode::Robin)?;
        let (fs, ss) = join2(
            || self.fluid_sweep_operator(g_f),
            || self.structure_sweep_operator(g_s),
        );
        let (fs, ss) = (fs?, ss?);
        let coef = self.alpha_f + self.alpha_s;
        // block 1 = g_f - P_fs[g_s + coef * etadot(g_s)]
        let inner_s = g_s.add_scaled(coef, &ss.trace_rate);
        let block1 = g_f.add_scaled(-T::one(), &project(&inner_s, self.fluid_grid())?);
        // block 2 = g_s - P_sf[g_f - coef * u(g_f)]
        let inner_f = g_f.add_scaled(-coef, &fs.trace_velocity);
        let block2 = g_s.add_scaled(-T::one(), &project(&inner_f, self.structure_grid())?);
        Ok(InterfaceVector::Robin {
            g_f: block1,
            g_s: block2,
        })
    }

    /// Right-hand side of the Robin interface problem (zero-data sweeps with
    /// the true forcing, boundary and initial data).
    pub fn robin_rhs(&self) -> Result<InterfaceVector<T>> {
        self.require_mode(CouplingMode::Robin)?;
        let zero_f = TraceSeries::zeros(self.fluid_grid().clone(), self.trace_dim());
        let zero_s = TraceSeries::zeros(self.structure_grid().clone(), self.trace_dim());
        let (fs, ss) = join2(
            || self.fluid_sweep_full(&zero_f),
            || self.structure_sweep_full(&zero_s),
        );
        let (fs, ss) = (fs?, ss?);
        let coef = self.alpha_f + self.alpha_s;
        let block1 = project(
            &zero_s.add_scaled(coef, &ss.trace_rate),
            self.fluid_grid(),
        )?;
        let block2 = project(
            &zero_f.add_scaled(-coef, &fs.trace_velocity),
            self.structure_grid(),
        )?;
        Ok(InterfaceVector::Robin {
            g_f: block1,
            g_s: block2,
        })
    }

    /// Applies the Steklov-Poincare operator: traction `+g` into the fluid,
    /// `-g` (projected) into the structure, returning the interface velocity
    /// mismatch on the fluid grid.
    pub fn apply_sp(&self, g: &TraceSeries<T>) -> Result<TraceSeries<T>> {
        self.require_mode(CouplingMode::Neumann)?;
        let g_struct = project(&g.scaled(-T::one()), self.structure_grid())?;
        let (fs, ss) = join2(
            || self.fluid_sweep_operator(g),
            || self.structure_sweep_operator(&g_struct),
        );
        let (fs, ss) = (fs?, ss?);
        let rate_on_fluid = project(&ss.trace_rate, self.fluid_grid())?;
        Ok(fs
            .trace_velocity
            .add_scaled(-T::one(), &rate_on_fluid))
    }

    /// Right-hand side of the Steklov-Poincare problem.
    pub fn sp_rhs(&self) -> Result<TraceSeries<T>> {
        self.require_mode(CouplingMode::Neumann)?;
        let zero_f = TraceSeries::zeros(self.fluid_grid().clone(), self.trace_dim());
        let zero_s = TraceSeries::zeros(self.structure_grid().clone(), self.trace_dim());
        let (fs, ss) = join2(
            || self.fluid_sweep_full(&zero_f),
            || self.structure_sweep_full(&zero_s),
        );
        let (fs, ss) = (fs?, ss?);
        let rate_on_fluid = project(&ss.trace_rate, self.fluid_grid())?;
        // rhs = -(u(0)|_G - P_fs etadot(0)|_G)
        Ok(rate_on_fluid.add_scaled(-T::one(), &fs.trace_velocity))
    }

    /// Solves the chosen interface problem with full GMRES.
    pub fn solve_interface(
        &self,
        method: Method,
        tol: T,
        maxit: usize,
    ) -> Result<(InterfaceVector<T>, KrylovReport<T>)> {
        match method {
            Method::RobinGmres => {
                let rhs_vec = self.robin_rhs()?;
                let shape = self.zero_vector(Method::RobinGmres);
                let rhs = rhs_vec.flatten();
                let (x, report) = gmres(
                    |flat: &[T]| {
                        let z = shape.unflatten_like(flat);
                        self.apply_robin(&z)
                            .expect("Robin operator application failed")
                            .flatten()
                    },
                    &rhs,
                    tol,
                    maxit,
                );
                Ok((shape.unflatten_like(&x), report))
            }
            Method::SteklovPoincare => {
                let rhs_series = self.sp_rhs()?;
                let shape = self.zero_vector(Method::SteklovPoincare);
                let rhs = InterfaceVector::Sp(rhs_series).flatten();
                let (x, report) = gmres(
                    |flat: &[T]| {
                        let g = match shape.unflatten_like(flat) {
                            InterfaceVector::Sp(g) => g,
                            _ => unreachable!(),
                        };
                        let out = self
                            .apply_sp(&g)
                            .expect("Steklov-Poincare operator application failed");
                        InterfaceVector::Sp(out).flatten()
                    },
                    &rhs,
                    tol,
                    maxit,
                );
                Ok((shape.unflatten_like(&x), report))
            }
        }
    }

    /// Jacobi-type Schwarz waveform relaxation on the Robin conditions.
    ///
    /// Both subdomains sweep with the previous iterate's data; the new data
    /// are the projected Robin combinations of the resulting traces. Stops
    /// when the relative update of the flattened pair drops below `tol`.
    /// Records the interface energy `B^k` of every iterate.
    pub fn swr_solve(
        &self,
        tol: T,
        maxit: usize,
        initial: Option<InterfaceVector<T>>,
    ) -> Result<(InterfaceVector<T>, SwrReport<T>)> {
        self.require_mode(CouplingMode::Robin)?;
        let mut z = match initial {
            Some(z0) => match z0 {
                InterfaceVector::Robin { .. } => z0,
                InterfaceVector::Sp(_) => {
                    return Err(Error::Config("waveform relaxation needs a Robin vector".into()))
                }
            },
            None => self.zero_vector(Method::RobinGmres),
        };
        let coef = self.alpha_f + self.alpha_s;
        let mut report = SwrReport {
            update_norms: Vec::new(),
            energy: Vec::new(),
            iterations: 0,
            converged: false,
        };
        for _k in 1..=maxit {
            let (g_f, g_s) = match &z {
                InterfaceVector::Robin { g_f, g_s } => (g_f, g_s),
                _ => unreachable!(),
            };
            let (fs, ss) = join2(
                || self.fluid_sweep_full(g_f),
                || self.structure_sweep_full(g_s),
            );
            let (fs, ss) = (fs?, ss?);
            // pre-projection next data; also the Robin residual combinations
            // whose space-time norm is the interface energy B^k
            let pre_f = g_s.add_scaled(coef, &ss.trace_rate); // on tau_s
            let pre_s = g_f.add_scaled(-coef, &fs.trace_velocity); // on tau_f
            let b_k = (self.series_norm_sq(&pre_s, self.fluid.trace_mass())
                + self.series_norm_sq(&pre_f, self.structure.trace_mass()))
                / (lit::<T>(2.0) * coef);
            report.energy.push(b_k);

            let z_next = InterfaceVector::Robin {
                g_f: project(&pre_f, self.fluid_grid())?,
                g_s: project(&pre_s, self.structure_grid())?,
            };
            let (flat, flat_next) = (z.flatten(), z_next.flatten());
            let diff: Vec<T> = flat_next
                .iter()
                .zip(&flat)
                .map(|(&a, &b)| a - b)
                .collect();
            let scale = norm2(&flat_next).max(lit::<T>(1e-300));
            let update = norm2(&diff) / scale;
            report.update_norms.push(update);
            report.iterations += 1;
            z = z_next;
            if update <= tol {
                report.converged = true;
                break;
            }
        }
        Ok((z, report))
    }

    /// `integral_0^T |series|_{L2(Gamma)}^2 dt` using a trace mass matrix.
    fn series_norm_sq(&self, series: &TraceSeries<T>, mass: &Csr<T>) -> T {
        let vdim = self.fluid.space_v().vdim();
        let mut total = T::zero();
        for m in 0..series.grid().n_slabs() {
            let dt = series.grid().dt(m);
            let w = series.slab_value(m);
            for c in 0..vdim {
                let comp: Vec<T> = w.iter().skip(c).step_by(vdim).copied().collect();
                let mw = mass.mul_vec(&comp);
                total = total + dt * crate::scalar::dot(&comp, &mw);
            }
        }
        total
    }

    /// One last pair of sweeps with the solved interface values and the full
    /// problem data.
    pub fn finalize(
        &self,
        z: &InterfaceVector<T>,
    ) -> Result<(FluidSweep<T>, StructureSweep<T>)> {
        match z {
            InterfaceVector::Sp(g) => {
                self.require_mode(CouplingMode::Neumann)?;
                let g_struct = project(&g.scaled(-T::one()), self.structure_grid())?;
                let (fs, ss) = join2(
                    || self.fluid_sweep_full(g),
                    || self.structure_sweep_full(&g_struct),
                );
                Ok((fs?, ss?))
            }
            InterfaceVector::Robin { g_f, g_s } => {
                self.require_mode(CouplingMode::Robin)?;
                let (fs, ss) = join2(
                    || self.fluid_sweep_full(g_f),
                    || self.structure_sweep_full(g_s),
                );
                Ok((fs?, ss?))
            }
        }
    }

    /// Interface velocity error `1/2 |u - etadot|^2_{L2(Gamma)}` at the final
    /// time: both backward-Euler states at `t = T`, the last slab value of
    /// each grid. (The slab-projected mismatch is what the interface solve
    /// drives to the tolerance; the pointwise-in-time mismatch at `T` keeps
    /// the genuine discretization error visible.)
    pub fn interface_velocity_error(
        &self,
        fs: &FluidSweep<T>,
        ss: &StructureSweep<T>,
    ) -> Result<T> {
        let last = self.fluid_grid().n_slabs() - 1;
        let last_s = self.structure_grid().n_slabs() - 1;
        let jump: Vec<T> = fs
            .trace_velocity
            .slab_value(last)
            .iter()
            .zip(ss.trace_rate.slab_value(last_s))
            .map(|(&a, &b)| a - b)
            .collect();
        let vdim = self.fluid.space_v().vdim();
        let mass = self.fluid.trace_mass();
        let mut total = T::zero();
        for c in 0..vdim {
            let comp: Vec<T> = jump.iter().skip(c).step_by(vdim).copied().collect();
            let mw = mass.mul_vec(&comp);
            total = total + crate::scalar::dot(&comp, &mw);
        }
        Ok(total / lit::<T>(2.0))
    }

    fn require_mode(&self, mode: CouplingMode) -> Result<()> {
        if self.fluid.mode() != mode {
            return Err(Error::Config(format!(
                "solvers were built for {:?} coupling, operation needs {:?}",
                self.fluid.mode(),
                mode
            )));
        }
        Ok(())
    }
}
