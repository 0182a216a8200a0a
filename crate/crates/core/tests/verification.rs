//! The self-check suite passes on a sound build and catches injected faults.

use fsi_core::cases::{run_hemodynamics, run_verification, Case, RunConfig};
use fsi_core::verify::FaultInjection;

#[test]
fn verification_suite_passes_clean() {
    let report = run_verification(None).unwrap();
    for check in &report.checks {
        println!(
            "{} {} - {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    assert!(report.ok(), "failures: {:?}", report.failures());
}

#[test]
fn verification_detects_a_perturbed_matrix_entry() {
    // a 1e-3 nudge to one assembled stiffness entry must break the
    // dense-operator equivalence
    // entry (8, 8): an interior vertex DOF that Dirichlet elimination keeps
    let fault = FaultInjection {
        row: 8,
        col: 8,
        delta: 1e-3,
    };
    let report = run_verification(Some(fault)).unwrap();
    let broken: Vec<_> = report
        .failures()
        .iter()
        .map(|c| c.name.clone())
        .collect();
    assert!(
        broken.iter().any(|n| n.contains("dense oracle")),
        "fault injection went unnoticed; failures: {broken:?}"
    );
    // the fault must not break unrelated checks
    assert!(report
        .checks
        .iter()
        .filter(|c| !c.name.contains("dense oracle") && !c.name.contains("linear"))
        .all(|c| c.passed));
}

#[test]
fn reports_are_deterministic_across_runs() {
    let mut cfg = fsi_core::cases::RunConfig::mms_defaults();
    cfg.h = 0.25;
    cfg.dt_f = 0.00125;
    cfg.dt_s = 0.000625;
    let a = fsi_core::cases::run_mms(&cfg).unwrap();
    let b = fsi_core::cases::run_mms(&cfg).unwrap();
    assert_eq!(a.err_u_l2, b.err_u_l2);
    assert_eq!(a.err_u_h1, b.err_u_h1);
    assert_eq!(a.err_p_l2, b.err_p_l2);
    assert_eq!(a.err_eta_l2, b.err_eta_l2);
    assert_eq!(a.err_eta_h1, b.err_eta_h1);
    assert_eq!(a.iters, b.iters);
    assert_eq!(a.iface_err, b.iface_err);
    assert_eq!(a.residual_history, b.residual_history);
}

#[test]
fn hemodynamics_driver_smoke_test() {
    // a short pulse window on the coarse channel exercises the whole driver
    let mut cfg = RunConfig::hemo_defaults();
    cfg.case = Case::Hemo;
    cfg.t_end = 0.002;
    cfg.dt_f = 2e-4;
    cfg.dt_s = 1e-4;
    cfg.h = 0.1;
    cfg.maxit = 200;
    let hemo = run_hemodynamics(&cfg).unwrap();
    assert!(hemo.report.converged);
    assert!(hemo.report.all_finite());
    // pulse is active for t <= 0.025, so the wall is already moving
    let moved = hemo
        .displacement
        .iter()
        .map(|r| r[1].abs().max(r[2].abs()).max(r[3].abs()))
        .fold(0.0f64, f64::max);
    assert!(moved > 0.0, "no wall motion during the pulse");
    assert_eq!(hemo.displacement.len(), 21); // t = 0 plus 20 structure slabs
    assert_eq!(hemo.displacement[0], [0.0; 4]);
}
