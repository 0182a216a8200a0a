//! Experiment drivers: the manufactured-solution study, the hemodynamics
//! benchmark, convergence studies and the verification suite, plus the CSV
//! report formats. Everything here runs in double precision.

use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::fem::{error_norm, ElementKind, FeSpace, NormKind};
use crate::interface::{CoupledProblem, InterfaceVector, Method, ProblemData};
use crate::mesh::{build_interface_map, build_structured_mesh, BoundarySpec, BoundaryTag};
use crate::mms::ManufacturedSolution;
use crate::subdomain::{
    shared_active_trace, CouplingMode, FluidSolver, FluidSweep, MaterialParams, StructureSolver,
    StructureSweep,
};
use crate::timegrid::TimeGrid;
pub use crate::verify::{run_all as run_verification, FaultInjection, VerificationReport};

/// Which experiment a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Mms,
    Hemo,
    Verify,
}

/// Interface solver choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Sp,
    RobinGmres,
    RobinSwr,
}

impl SolverMethod {
    pub fn label(self) -> &'static str {
        match self {
            SolverMethod::Sp => "sp",
            SolverMethod::RobinGmres => "robin_gmres",
            SolverMethod::RobinSwr => "robin_swr",
        }
    }

    fn coupling(self) -> CouplingMode {
        match self {
            SolverMethod::Sp => CouplingMode::Neumann,
            SolverMethod::RobinGmres | SolverMethod::RobinSwr => CouplingMode::Robin,
        }
    }
}

/// Element pair choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementSet {
    /// P2/P1 for the fluid, P2 for the structure.
    TaylorHoodP2,
    /// P1+bubble/P1 for the fluid, P1 for the structure.
    MiniP1,
}

impl ElementSet {
    pub fn label(self) -> &'static str {
        match self {
            ElementSet::TaylorHoodP2 => "taylor_hood_p2",
            ElementSet::MiniP1 => "mini_p1",
        }
    }

    fn velocity_kind(self) -> ElementKind {
        match self {
            ElementSet::TaylorHoodP2 => ElementKind::P2,
            ElementSet::MiniP1 => ElementKind::P1Bubble,
        }
    }

    fn displacement_kind(self) -> ElementKind {
        match self {
            ElementSet::TaylorHoodP2 => ElementKind::P2,
            ElementSet::MiniP1 => ElementKind::P1,
        }
    }

    fn norm_degree(self) -> usize {
        // 2 p + 3 for the highest polynomial degree involved
        match self {
            ElementSet::TaylorHoodP2 => 7,
            ElementSet::MiniP1 => 9,
        }
    }
}

/// One solver run, fully specified.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: Case,
    pub method: SolverMethod,
    pub elements: ElementSet,
    /// Mesh size: `1/n` for the manufactured case, `h_y` for hemodynamics
    /// (where `h_x` is pinned to 0.1).
    pub h: f64,
    pub dt_f: f64,
    pub dt_s: f64,
    /// Final time `T`.
    pub t_end: f64,
    pub alpha_f: f64,
    pub alpha_s: f64,
    /// Relative tolerance of the interface solver.
    pub tol: f64,
    pub maxit: usize,
    /// Output directory for the CSV reports (used by the CLI).
    pub outdir: std::path::PathBuf,
}

impl RunConfig {
    /// Defaults of the manufactured-solution experiment.
    pub fn mms_defaults() -> Self {
        RunConfig {
            case: Case::Mms,
            method: SolverMethod::Sp,
            elements: ElementSet::TaylorHoodP2,
            h: 1.0 / 8.0,
            dt_f: 5e-5,
            dt_s: 2.5e-5,
            t_end: 0.0025,
            alpha_f: 1.0,
            alpha_s: 100.0,
            tol: 1e-7,
            maxit: 200,
            outdir: std::path::PathBuf::from("out"),
        }
    }

    /// Defaults of the hemodynamics benchmark.
    pub fn hemo_defaults() -> Self {
        RunConfig {
            case: Case::Hemo,
            method: SolverMethod::Sp,
            elements: ElementSet::MiniP1,
            h: 0.1,
            dt_f: 2e-4,
            dt_s: 1e-4,
            t_end: 0.1,
            alpha_f: 1.0,
            alpha_s: 100.0,
            tol: 1e-7,
            maxit: 800,
            outdir: std::path::PathBuf::from("out"),
        }
    }

    fn slab_count(&self, dt: f64) -> Result<usize> {
        let ratio = self.t_end / dt;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-8 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "time step {dt} does not divide T = {}",
                self.t_end
            )));
        }
        Ok(m as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.dt_f > 0.0 && self.dt_s > 0.0 && self.t_end > 0.0) {
            return Err(Error::Config("h, dt and T must be positive".into()));
        }
        if self.alpha_f < 0.0 || self.alpha_s < 0.0 {
            return Err(Error::Config("Robin weights must be nonnegative".into()));
        }
        self.slab_count(self.dt_f)?;
        self.slab_count(self.dt_s)?;
        Ok(())
    }
}

/// Per-run error and effort summary.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_p_l2: f64,
    pub err_eta_l2: f64,
    pub err_eta_h1: f64,
    /// GMRES or waveform-relaxation iteration count.
    pub iters: usize,
    /// Wall time of the solve phase in seconds.
    pub wall_s: f64,
    /// `1/2 |u - etadot|^2_Gamma` at the final time.
    pub iface_err: f64,
    /// Per-iteration relative residual (GMRES) or update (SWR) history.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

impl ErrorReport {
    pub fn all_finite(&self) -> bool {
        [
            self.err_u_l2,
            self.err_u_h1,
            self.err_p_l2,
            self.err_eta_l2,
            self.err_eta_h1,
            self.wall_s,
            self.iface_err,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }
}

/// Pointwise values of the manufactured solution and its data at `(x, y, t)`.
#[derive(Debug, Clone)]
pub struct MmsValues {
    pub velocity: [f64; 2],
    pub pressure: f64,
    pub displacement: [f64; 2],
    pub displacement_rate: [f64; 2],
    pub fluid_forcing: [f64; 2],
    pub structure_forcing: [f64; 2],
    /// `sigma_f n_f` on the interface line.
    pub fluid_traction: [f64; 2],
    /// `sigma_s n_s` on the interface line.
    pub structure_traction: [f64; 2],
}

/// Evaluates every manufactured field at one point.
pub fn mms_exact(params: &MaterialParams<f64>, x: f64, y: f64, t: f64) -> MmsValues {
    let mms = ManufacturedSolution::new(params);
    MmsValues {
        velocity: mms.velocity(x, y, t),
        pressure: mms.pressure(x, y, t),
        displacement: mms.displacement(x, y, t),
        displacement_rate: mms.displacement_rate(x, y, t),
        fluid_forcing: mms.fluid_forcing(x, y, t),
        structure_forcing: mms.structure_forcing(x, y, t),
        fluid_traction: mms.fluid_traction_up(x, y, t),
        structure_traction: mms.structure_traction_down(x, y, t),
    }
}

fn unity_params(alpha_f: f64, alpha_s: f64) -> MaterialParams<f64> {
    MaterialParams {
        rho_f: 1.0,
        nu_f: 1.0,
        rho_s: 1.0,
        nu_s: 1.0,
        lambda: 1.0,
        alpha_f,
        alpha_s,
    }
}

/// Builds the two stacked unit squares of the manufactured case with the
/// configured discretization, manufactured data included.
pub fn build_mms_problem(cfg: &RunConfig) -> Result<CoupledProblem<f64>> {
    cfg.validate()?;
    let n = (1.0 / cfg.h).round();
    if !(n >= 1.0) || (1.0 / cfg.h - n).abs() > 1e-9 * n {
        return Err(Error::Config(format!("h = {} is not 1/n", cfg.h)));
    }
    let n = n as usize;

    let mesh_f = Arc::new(build_structured_mesh(
        (0.0, 0.0, 1.0, 1.0),
        n,
        n,
        BoundarySpec {
            left: BoundaryTag::GammaF,
            right: BoundaryTag::GammaF,
            bottom: BoundaryTag::GammaF,
            top: BoundaryTag::Interface,
        },
    )?);
    let mesh_s = Arc::new(build_structured_mesh(
        (0.0, 1.0, 1.0, 2.0),
        n,
        n,
        BoundarySpec {
            left: BoundaryTag::GammaS,
            right: BoundaryTag::GammaS,
            bottom: BoundaryTag::Interface,
            top: BoundaryTag::GammaS,
        },
    )?);
    build_interface_map(&mesh_f, &mesh_s)?;

    let params = unity_params(cfg.alpha_f, cfg.alpha_s);
    let vel = Arc::new(FeSpace::new(
        mesh_f.clone(),
        cfg.elements.velocity_kind(),
        2,
    )?);
    let pre = Arc::new(FeSpace::new(mesh_f, ElementKind::P1, 1)?);
    let dsp = Arc::new(FeSpace::new(
        mesh_s,
        cfg.elements.displacement_kind(),
        2,
    )?);
    let grid_f = Arc::new(TimeGrid::uniform(cfg.t_end, cfg.slab_count(cfg.dt_f)?)?);
    let grid_s = Arc::new(TimeGrid::uniform(cfg.t_end, cfg.slab_count(cfg.dt_s)?)?);

    let mode = cfg.method.coupling();
    let active = shared_active_trace(&vel, &[BoundaryTag::GammaF], &dsp, &[BoundaryTag::GammaS])?;
    let fluid = FluidSolver::new(
        vel.clone(),
        pre,
        params,
        mode,
        grid_f,
        vec![BoundaryTag::GammaF],
        active.clone(),
    )?;
    let structure = StructureSolver::new(
        dsp.clone(),
        params,
        mode,
        grid_s,
        vec![BoundaryTag::GammaS],
        active,
    )?;

    let mms = Arc::new(ManufacturedSolution::new(&params));
    let mut data = ProblemData::zero(vel.n_dofs(), dsp.n_dofs());
    let (m1, m2, m3, m4) = (mms.clone(), mms.clone(), mms.clone(), mms.clone());
    data.fluid_forcing = Some(Box::new(move |x, y, t| m1.fluid_forcing(x, y, t)));
    data.fluid_dirichlet = Some(Box::new(move |x, y, t| m2.velocity(x, y, t)));
    data.structure_forcing = Some(Box::new(move |x, y, t| m3.structure_forcing(x, y, t)));
    data.structure_dirichlet = Some(Box::new(move |x, y, t| m4.displacement(x, y, t)));
    data.initial_velocity = vel.interpolate(&|x, y| mms.velocity(x, y, 0.0));
    data.initial_displacement = dsp.interpolate(&|x, y| mms.displacement(x, y, 0.0));
    data.initial_rate = dsp.interpolate(&|x, y| mms.velocity(x, y, 0.0));

    CoupledProblem::new(fluid, structure, data)
}

/// Solves the interface problem with the configured method and finalizes.
fn solve_and_finalize(
    cp: &CoupledProblem<f64>,
    cfg: &RunConfig,
) -> Result<(FluidSweep<f64>, StructureSweep<f64>, usize, Vec<f64>, bool, f64)> {
    let t0 = Instant::now();
    let (z, iters, history, converged): (InterfaceVector<f64>, usize, Vec<f64>, bool) =
        match cfg.method {
            SolverMethod::Sp => {
                let (z, rep) = cp.solve_interface(Method::SteklovPoincare, cfg.tol, cfg.maxit)?;
                (z, rep.iterations, rep.residual_history, rep.converged)
            }
            SolverMethod::RobinGmres => {
                let (z, rep) = cp.solve_interface(Method::RobinGmres, cfg.tol, cfg.maxit)?;
                (z, rep.iterations, rep.residual_history, rep.converged)
            }
            SolverMethod::RobinSwr => {
                let (z, rep) = cp.swr_solve(cfg.tol, cfg.maxit, None)?;
                (z, rep.iterations, rep.update_norms, rep.converged)
            }
        };
    let (fs, ss) = cp.finalize(&z)?;
    let wall = t0.elapsed().as_secs_f64();
    Ok((fs, ss, iters, history, converged, wall))
}

/// Runs the manufactured-solution case and reports errors at the final time.
pub fn run_mms(cfg: &RunConfig) -> Result<ErrorReport> {
    if cfg.case != Case::Mms {
        return Err(Error::Config("run_mms needs case = mms".into()));
    }
    let cp = build_mms_problem(cfg)?;
    let (fs, ss, iters, history, converged, wall) = solve_and_finalize(&cp, cfg)?;

    let params = unity_params(cfg.alpha_f, cfg.alpha_s);
    let mms = ManufacturedSolution::new(&params);
    let t_end = cfg.t_end;
    let deg = cfg.elements.norm_degree();
    let mf = cp.fluid_grid().n_slabs();
    let ms = cp.structure_grid().n_slabs();

    let u = &fs.history.velocity[mf - 1];
    let p = &fs.history.pressure[mf - 1];
    let eta = &ss.history.displacement[ms - 1];

    let err_u_l2 = error_norm(
        cp.fluid.space_v(),
        u,
        &|x, y| mms.velocity(x, y, t_end),
        None,
        NormKind::L2,
        deg,
    );
    let err_u_h1 = error_norm(
        cp.fluid.space_v(),
        u,
        &|x, y| mms.velocity(x, y, t_end),
        Some(&|x, y| mms.velocity_grad(x, y, t_end)),
        NormKind::H1Semi,
        deg,
    );
    let err_p_l2 = error_norm(
        cp.fluid.space_p(),
        p,
        &|x, y| [mms.pressure(x, y, t_end), 0.0],
        None,
        NormKind::L2,
        deg,
    );
    let err_eta_l2 = error_norm(
        cp.structure.space(),
        eta,
        &|x, y| mms.displacement(x, y, t_end),
        None,
        NormKind::L2,
        deg,
    );
    let err_eta_h1 = error_norm(
        cp.structure.space(),
        eta,
        &|x, y| mms.displacement(x, y, t_end),
        Some(&|x, y| mms.displacement_grad(x, y, t_end)),
        NormKind::H1Semi,
        deg,
    );
    let iface_err = cp.interface_velocity_error(&fs, &ss)?;

    Ok(ErrorReport {
        err_u_l2,
        err_u_h1,
        err_p_l2,
        err_eta_l2,
        err_eta_h1,
        iters,
        wall_s: wall,
        iface_err,
        residual_history: history,
        converged,
    })
}

/// Study axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyAxis {
    Space,
    Time,
}

/// One row of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyRow {
    /// Time-grid family: `conforming_coarse`, `conforming_fine`,
    /// `nonconforming`, or `space` for the spatial study.
    pub family: String,
    pub h: f64,
    pub dt_f: f64,
    pub dt_s: f64,
    pub report: ErrorReport,
    /// `log2(e_prev / e_this)` within the same family, ordered
    /// `[u_l2, u_h1, p_l2, eta_l2, eta_h1]`.
    pub rates: Option<[f64; 5]>,
}

fn rates_between(prev: &ErrorReport, cur: &ErrorReport) -> [f64; 5] {
    let r = |a: f64, b: f64| (a / b).log2();
    [
        r(prev.err_u_l2, cur.err_u_l2),
        r(prev.err_u_h1, cur.err_u_h1),
        r(prev.err_p_l2, cur.err_p_l2),
        r(prev.err_eta_l2, cur.err_eta_l2),
        r(prev.err_eta_h1, cur.err_eta_h1),
    ]
}

/// Halving study along the chosen axis. For the time axis every level runs
/// the three grid families (coarse conforming, fine conforming,
/// nonconforming with the structure on the fine grid).
pub fn run_convergence_study(
    cfg: &RunConfig,
    axis: StudyAxis,
    levels: usize,
) -> Result<Vec<StudyRow>> {
    if levels < 2 {
        return Err(Error::Config("a study needs at least two levels".into()));
    }
    let mut rows: Vec<StudyRow> = Vec::new();
    match axis {
        StudyAxis::Space => {
            for level in 0..levels {
                let mut c = cfg.clone();
                c.h = cfg.h / (1 << level) as f64;
                let report = run_mms(&c)?;
                let rates = rows
                    .last()
                    .map(|prev: &StudyRow| rates_between(&prev.report, &report));
                rows.push(StudyRow {
                    family: "space".into(),
                    h: c.h,
                    dt_f: c.dt_f,
                    dt_s: c.dt_s,
                    report,
                    rates,
                });
            }
        }
        StudyAxis::Time => {
            for level in 0..levels {
                let dt_coarse = cfg.dt_f / (1 << level) as f64;
                let dt_fine = dt_coarse / 2.0;
                for (family, dt_f, dt_s) in [
                    ("conforming_coarse", dt_coarse, dt_coarse),
                    ("conforming_fine", dt_fine, dt_fine),
                    ("nonconforming", dt_coarse, dt_fine),
                ] {
                    let mut c = cfg.clone();
                    c.dt_f = dt_f;
                    c.dt_s = dt_s;
                    let report = run_mms(&c)?;
                    let rates = rows
                        .iter()
                        .rev()
                        .find(|r| r.family == family)
                        .map(|prev| rates_between(&prev.report, &report));
                    rows.push(StudyRow {
                        family: family.into(),
                        h: c.h,
                        dt_f,
                        dt_s,
                        report,
                        rates,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Inlet traction pulse of the hemodynamics benchmark.
pub fn inlet_stress(t: f64) -> [f64; 2] {
    if t <= 0.025 {
        [
            -1e3 * (1.0 - (2.0 * std::f64::consts::PI * t / 0.025).cos()),
            0.0,
        ]
    } else {
        [0.0, 0.0]
    }
}

/// Hemodynamics material constants (CGS): `lambda = nu E / ((1-2nu)(1+nu))`,
/// `nu_s = E / (2(1+nu))` with `E = 3e6`, `nu = 0.3`.
pub fn hemo_params(alpha_f: f64, alpha_s: f64) -> MaterialParams<f64> {
    let e = 3e6;
    let nu = 0.3;
    MaterialParams {
        rho_f: 1.0,
        nu_f: 0.035,
        rho_s: 1.1,
        nu_s: e / (2.0 * (1.0 + nu)),
        lambda: nu * e / ((1.0 - 2.0 * nu) * (1.0 + nu)),
        alpha_f,
        alpha_s,
    }
}

/// Hemodynamics output: monitored displacements plus the usual summary.
#[derive(Debug, Clone)]
pub struct HemoReport {
    /// Rows `(t, eta_y at x=1.5, x=3.0, x=4.5)` per structure slab.
    pub displacement: Vec<[f64; 4]>,
    pub report: ErrorReport,
}

/// Runs the pressure-pulse channel benchmark with the Steklov-Poincare
/// method: traction pulse at the inlet, traction-free outlet, no-slip wall,
/// clamped structure ends, free outer structure surface.
pub fn run_hemodynamics(cfg: &RunConfig) -> Result<HemoReport> {
    if cfg.case != Case::Hemo {
        return Err(Error::Config("run_hemodynamics needs case = hemo".into()));
    }
    if cfg.method != SolverMethod::Sp {
        return Err(Error::Config(
            "the hemodynamics benchmark runs with the Steklov-Poincare method".into(),
        ));
    }
    cfg.validate()?;

    let h_x: f64 = 0.1;
    let nx = (6.0 / h_x).round() as usize;
    let ny_f = (1.0 / cfg.h).round() as usize;
    let ny_s = ((0.1 / cfg.h).round() as usize).max(1);
    if !((1.0 / cfg.h) - ny_f as f64).abs().le(&(1e-9 * ny_f as f64)) {
        return Err(Error::Config(format!("h_y = {} is not 1/n", cfg.h)));
    }

    let mesh_f = Arc::new(build_structured_mesh(
        (0.0, 0.0, 6.0, 1.0),
        nx,
        ny_f,
        BoundarySpec {
            left: BoundaryTag::Inlet,
            right: BoundaryTag::Outlet,
            bottom: BoundaryTag::Bottom,
            top: BoundaryTag::Interface,
        },
    )?);
    let mesh_s = Arc::new(build_structured_mesh(
        (0.0, 1.0, 6.0, 1.1),
        nx,
        ny_s,
        BoundarySpec {
            left: BoundaryTag::GammaS,
            right: BoundaryTag::GammaS,
            bottom: BoundaryTag::Interface,
            top: BoundaryTag::Top,
        },
    )?);
    build_interface_map(&mesh_f, &mesh_s)?;

    let params = hemo_params(cfg.alpha_f, cfg.alpha_s);
    let vel = Arc::new(FeSpace::new(
        mesh_f.clone(),
        cfg.elements.velocity_kind(),
        2,
    )?);
    let pre = Arc::new(FeSpace::new(mesh_f, ElementKind::P1, 1)?);
    let dsp = Arc::new(FeSpace::new(mesh_s, cfg.elements.displacement_kind(), 2)?);
    let grid_f = Arc::new(TimeGrid::uniform(cfg.t_end, cfg.slab_count(cfg.dt_f)?)?);
    let grid_s = Arc::new(TimeGrid::uniform(cfg.t_end, cfg.slab_count(cfg.dt_s)?)?);

    let active = shared_active_trace(&vel, &[BoundaryTag::Bottom], &dsp, &[BoundaryTag::GammaS])?;
    let fluid = FluidSolver::new(
        vel.clone(),
        pre,
        params,
        CouplingMode::Neumann,
        grid_f,
        vec![BoundaryTag::Bottom],
        active.clone(),
    )?;
    let structure = StructureSolver::new(
        dsp.clone(),
        params,
        CouplingMode::Neumann,
        grid_s,
        vec![BoundaryTag::GammaS],
        active,
    )?;

    let mut data = ProblemData::zero(vel.n_dofs(), dsp.n_dofs());
    data.fluid_neumann = vec![(
        BoundaryTag::Inlet,
        Box::new(|_x: f64, _y: f64, t: f64| inlet_stress(t)) as Box<crate::subdomain::FieldFn<f64>>,
    )];
    // outlet and outer structure surface are traction free (natural)

    let cp = CoupledProblem::new(fluid, structure, data)?;
    let (fs, ss, iters, history, converged, wall) = solve_and_finalize(&cp, cfg)?;
    let iface_err = cp.interface_velocity_error(&fs, &ss)?;

    // monitored vertical displacements on the interface
    let monitors = [1.5, 3.0, 4.5];
    let space = cp.structure.space();
    let mut nodes = Vec::new();
    for &mx in &monitors {
        let found = space
            .trace_nodes()
            .iter()
            .find(|&&node| {
                let p = space.dof_coord(node);
                (p[0] - mx).abs() < 1e-9 && (p[1] - 1.0).abs() < 1e-9
            })
            .ok_or_else(|| {
                Error::Config(format!("monitor point x = {mx} is not an interface node"))
            })?;
        nodes.push(*found);
    }
    let mut displacement = Vec::with_capacity(ss.history.displacement.len() + 1);
    displacement.push([0.0, 0.0, 0.0, 0.0]);
    for (n, eta) in ss.history.displacement.iter().enumerate() {
        let t = cp.structure_grid().slab(n).1;
        displacement.push([
            t,
            eta[space.system_dof(nodes[0], 1)],
            eta[space.system_dof(nodes[1], 1)],
            eta[space.system_dof(nodes[2], 1)],
        ]);
    }

    Ok(HemoReport {
        displacement,
        report: ErrorReport {
            err_u_l2: 0.0,
            err_u_h1: 0.0,
            err_p_l2: 0.0,
            err_eta_l2: 0.0,
            err_eta_h1: 0.0,
            iters,
            wall_s: wall,
            iface_err,
            residual_history: history,
            converged,
        },
    })
}

/// Formats a float with six significant digits in scientific notation.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.5e}")
}

pub const ERRORS_CSV_HEADER: &str =
    "h,dt_f,dt_s,method,alpha_f,alpha_s,err_u_L2,err_u_H1,err_p_L2,err_eta_L2,err_eta_H1,iters,wall_s,iface_err";

/// One `errors.csv` row echoing the configuration it came from.
pub fn errors_csv_row(cfg: &RunConfig, report: &ErrorReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_sci(cfg.h),
        fmt_sci(cfg.dt_f),
        fmt_sci(cfg.dt_s),
        cfg.method.label(),
        fmt_sci(cfg.alpha_f),
        fmt_sci(cfg.alpha_s),
        fmt_sci(report.err_u_l2),
        fmt_sci(report.err_u_h1),
        fmt_sci(report.err_p_l2),
        fmt_sci(report.err_eta_l2),
        fmt_sci(report.err_eta_h1),
        report.iters,
        fmt_sci(report.wall_s),
        fmt_sci(report.iface_err),
    )
}

pub const DISPLACEMENT_CSV_HEADER: &str = "t,x1_disp,x2_disp,x3_disp";

pub fn displacement_csv_rows(rows: &[[f64; 4]]) -> String {
    let mut out = String::from(DISPLACEMENT_CSV_HEADER);
    for r in rows {
        out.push('\n');
        out.push_str(&format!(
            "{},{},{},{}",
            fmt_sci(r[0]),
            fmt_sci(r[1]),
            fmt_sci(r[2]),
            fmt_sci(r[3])
        ));
    }
    out.push('\n');
    out
}

pub const RESIDUALS_CSV_HEADER: &str = "iter,residual";

pub fn residuals_csv_rows(history: &[f64]) -> String {
    let mut out = String::from(RESIDUALS_CSV_HEADER);
    for (k, r) in history.iter().enumerate() {
        out.push('\n');
        out.push_str(&format!("{k},{}", fmt_sci(*r)));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hemo_lame_constants_match_the_conversion() {
        let p = hemo_params(1.0, 100.0);
        assert!((p.lambda - 0.3 * 3e6 / (0.4 * 1.3)).abs() < 1e-6);
        assert!((p.lambda - 1.730769e6).abs() < 1.0);
        assert!((p.nu_s - 3e6 / 2.6).abs() < 1e-6);
        assert!((p.nu_s - 1.153846e6).abs() < 1.0);
    }

    #[test]
    fn inlet_pulse_peaks_at_minus_two_thousand() {
        let b = inlet_stress(0.0125);
        assert!((b[0] + 2000.0).abs() < 1e-9);
        assert_eq!(b[1], 0.0);
        assert_eq!(inlet_stress(0.03), [0.0, 0.0]);
        assert!((inlet_stress(0.0)[0]).abs() < 1e-12);
    }

    #[test]
    fn csv_row_uses_six_significant_digits() {
        assert_eq!(fmt_sci(2.05e-4), "2.05000e-4");
        assert_eq!(fmt_sci(0.1), "1.00000e-1");
        let cfg = RunConfig::mms_defaults();
        let report = ErrorReport {
            err_u_l2: 1.0,
            err_u_h1: 2.0,
            err_p_l2: 3.0,
            err_eta_l2: 4.0,
            err_eta_h1: 5.0,
            iters: 18,
            wall_s: 0.5,
            iface_err: 1e-9,
            residual_history: vec![1.0],
            converged: true,
        };
        let row = errors_csv_row(&cfg, &report);
        assert!(row.starts_with("1.25000e-1,5.00000e-5,2.50000e-5,sp,"));
        assert!(row.contains(",18,"));
        assert_eq!(
            ERRORS_CSV_HEADER.split(',').count(),
            row.split(',').count()
        );
    }

    #[test]
    fn config_rejects_nondividing_time_step() {
        let mut cfg = RunConfig::mms_defaults();
        cfg.dt_f = 3e-5; // 0.0025 / 3e-5 is not an integer
        assert!(cfg.validate().is_err());
        cfg.dt_f = 5e-5;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn small_mms_run_produces_sane_errors() {
        let mut cfg = RunConfig::mms_defaults();
        cfg.h = 0.25;
        cfg.dt_f = 0.00125;
        cfg.dt_s = 0.000625;
        cfg.method = SolverMethod::RobinGmres;
        let report = run_mms(&cfg).unwrap();
        assert!(report.converged);
        assert!(report.all_finite());
        assert!(report.err_u_l2 < 1e-2 && report.err_u_l2 > 1e-8);
        assert!(report.err_eta_h1 < 1e-1);
        assert!(report.iters <= 60);
    }
}
