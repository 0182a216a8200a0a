//! Minimal coupled solve: manufactured problem on two stacked unit squares,
//! nonconforming time grids, both interface formulations.

use fsi_core::cases::{run_mms, ElementSet, RunConfig, SolverMethod};

fn main() {
    let mut cfg = RunConfig::mms_defaults();
    cfg.h = 0.125;
    cfg.dt_f = 2.5e-4;
    cfg.dt_s = 1.25e-4;
    cfg.elements = ElementSet::TaylorHoodP2;

    for method in [SolverMethod::Sp, SolverMethod::RobinGmres, SolverMethod::RobinSwr] {
        cfg.method = method;
        let r = run_mms(&cfg).expect("solve failed");
        println!(
            "{:<12} iters {:>3}  u_L2 {:.3e}  p_L2 {:.3e}  eta_H1 {:.3e}  wall {:.3}s",
            method.label(),
            r.iters,
            r.err_u_l2,
            r.err_p_l2,
            r.err_eta_h1,
            r.wall_s
        );
    }
}
