//! Interface operator and driver checks on small manufactured problems.

use fsi_core::cases::{build_mms_problem, Case, ElementSet, RunConfig, SolverMethod};
use fsi_core::interface::{InterfaceVector, Method};
use fsi_core::scalar::rel_diff;
use fsi_core::subdomain::CouplingMode;
use fsi_core::verify::small_test_problem;

fn mms_config(method: SolverMethod, h: f64, dt_f: f64, dt_s: f64) -> RunConfig {
    RunConfig {
        case: Case::Mms,
        method,
        elements: ElementSet::TaylorHoodP2,
        h,
        dt_f,
        dt_s,
        t_end: 0.0025,
        alpha_f: 1.0,
        alpha_s: 100.0,
        tol: 1e-7,
        maxit: 200,
        outdir: std::path::PathBuf::from("out"),
    }
}

#[test]
fn operators_take_zero_to_zero() {
    let cp = small_test_problem(2, CouplingMode::Neumann, 2, 3, 1.0, 100.0, 0.1).unwrap();
    let zero = cp.zero_vector(Method::SteklovPoincare);
    let out = match &zero {
        InterfaceVector::Sp(g) => cp.apply_sp(g).unwrap(),
        _ => unreachable!(),
    };
    let mut flat = Vec::new();
    out.flatten_into(&mut flat);
    assert!(flat.iter().all(|&v: &f64| v == 0.0));

    let cp = small_test_problem(2, CouplingMode::Robin, 2, 3, 1.0, 100.0, 0.1).unwrap();
    let zero = cp.zero_vector(Method::RobinGmres);
    let out = cp.apply_robin(&zero).unwrap();
    assert!(out.flatten().iter().all(|&v| v == 0.0));
}

#[test]
fn zero_problem_data_gives_zero_rhs() {
    let cp = small_test_problem(2, CouplingMode::Robin, 2, 3, 1.0, 100.0, 0.1).unwrap();
    let rhs = cp.robin_rhs().unwrap();
    assert!(rhs.flatten().iter().all(|&v| v == 0.0));

    let cp = small_test_problem(2, CouplingMode::Neumann, 2, 3, 1.0, 100.0, 0.1).unwrap();
    let rhs = cp.sp_rhs().unwrap();
    let mut flat = Vec::new();
    rhs.flatten_into(&mut flat);
    assert!(flat.iter().all(|&v: &f64| v == 0.0));
}

#[test]
fn robin_rhs_scales_linearly_with_fluid_forcing() {
    let mut cp = small_test_problem(2, CouplingMode::Robin, 2, 2, 1.0, 10.0, 0.05).unwrap();
    cp.data.fluid_forcing = Some(Box::new(|x: f64, y: f64, _t: f64| [x + y, x - y]));
    let rhs1 = cp.robin_rhs().unwrap();
    cp.data.fluid_forcing = Some(Box::new(|x: f64, y: f64, _t: f64| {
        [2.0 * (x + y), 2.0 * (x - y)]
    }));
    let rhs2 = cp.robin_rhs().unwrap();
    match (&rhs1, &rhs2) {
        (
            InterfaceVector::Robin { g_f: _, g_s: a },
            InterfaceVector::Robin { g_f: _, g_s: b },
        ) => {
            // block 2 = -(a_f + a_s) P(u(0, f_f, u0)) doubles with f_f
            for m in 0..a.grid().n_slabs() {
                for (x, y) in a.slab_value(m).iter().zip(b.slab_value(m)) {
                    assert!((2.0 * x - y).abs() <= 1e-12 * y.abs().max(1e-30));
                }
            }
        }
        _ => unreachable!(),
    }
}

#[test]
fn sp_rhs_is_linear_in_the_initial_velocity() {
    let mut cp = small_test_problem(2, CouplingMode::Neumann, 2, 2, 1.0, 1.0, 0.05).unwrap();
    let n_u = cp.fluid.space_v().n_dofs();
    let mut u0 = vec![0.0; n_u];
    for (i, v) in u0.iter_mut().enumerate() {
        *v = ((i * 13 % 7) as f64 - 3.0) * 0.1;
    }
    cp.data.initial_velocity = u0.clone();
    let rhs1 = cp.sp_rhs().unwrap();
    cp.data.initial_velocity = u0.iter().map(|v| 2.0 * v).collect();
    let rhs2 = cp.sp_rhs().unwrap();
    for m in 0..rhs1.grid().n_slabs() {
        for (a, b) in rhs1.slab_value(m).iter().zip(rhs2.slab_value(m)) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-30));
        }
    }
}

#[test]
fn gmres_contract_holds_at_the_solution() {
    let cfg = mms_config(SolverMethod::Sp, 0.25, 0.000625, 0.000625);
    let cp = build_mms_problem(&cfg).unwrap();
    let (_, rep) = cp
        .solve_interface(Method::SteklovPoincare, cfg.tol, cfg.maxit)
        .unwrap();
    assert!(rep.converged);
    assert!(*rep.residual_history.last().unwrap() <= cfg.tol);
    // full GMRES: residuals never increase
    for w in rep.residual_history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-14));
    }
}

#[test]
fn sp_and_robin_agree_on_conforming_grids() {
    let dt = 0.0025 / 4.0;
    let sp_cfg = mms_config(SolverMethod::Sp, 0.125, dt, dt);
    let ro_cfg = mms_config(SolverMethod::RobinGmres, 0.125, dt, dt);

    let cp_sp = build_mms_problem(&sp_cfg).unwrap();
    let (z, _) = cp_sp
        .solve_interface(Method::SteklovPoincare, 1e-9, 300)
        .unwrap();
    let (fs_sp, ss_sp) = cp_sp.finalize(&z).unwrap();

    let cp_ro = build_mms_problem(&ro_cfg).unwrap();
    let (z, _) = cp_ro.solve_interface(Method::RobinGmres, 1e-9, 300).unwrap();
    let (fs_ro, ss_ro) = cp_ro.finalize(&z).unwrap();

    let mf = cp_sp.fluid_grid().n_slabs();
    let ms = cp_sp.structure_grid().n_slabs();
    let du = rel_diff(
        &fs_sp.history.velocity[mf - 1],
        &fs_ro.history.velocity[mf - 1],
    );
    let deta = rel_diff(
        &ss_sp.history.displacement[ms - 1],
        &ss_ro.history.displacement[ms - 1],
    );
    assert!(du <= 1e-6, "velocity mismatch {du}");
    assert!(deta <= 1e-6, "displacement mismatch {deta}");
}

#[test]
fn swr_at_the_fixed_point_stops_after_one_iteration() {
    let cfg = mms_config(SolverMethod::RobinGmres, 0.25, 0.000625, 0.0003125);
    let cp = build_mms_problem(&cfg).unwrap();
    let (z, rep) = cp.solve_interface(Method::RobinGmres, 1e-11, 300).unwrap();
    assert!(rep.converged);
    let (_, swr) = cp.swr_solve(1e-7, 50, Some(z)).unwrap();
    assert_eq!(swr.iterations, 1, "updates: {:?}", swr.update_norms);
    assert!(swr.converged);
    assert!(swr.update_norms[0] <= 1e-7);
}

#[test]
fn swr_limit_matches_robin_gmres() {
    let cfg = mms_config(SolverMethod::RobinSwr, 0.125, 0.000625, 0.0003125);
    let cp = build_mms_problem(&cfg).unwrap();
    let (z_gmres, repk) = cp.solve_interface(Method::RobinGmres, 1e-7, 300).unwrap();
    assert!(repk.converged);
    let (z_swr, reps) = cp.swr_solve(1e-9, 500, None).unwrap();
    assert!(reps.converged, "SWR did not converge: {:?}", reps.update_norms.last());
    let d = rel_diff(&z_swr.flatten(), &z_gmres.flatten());
    assert!(d <= 1e-6, "driver mismatch {d}");
}
