//! Command-line driver: runs the experiments and writes the CSV reports.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use fsi_core::cases::{
    displacement_csv_rows, errors_csv_row, residuals_csv_rows, run_convergence_study,
    run_hemodynamics, run_mms, run_verification, Case, ElementSet, ErrorReport, RunConfig,
    SolverMethod, StudyAxis, ERRORS_CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "fsi",
    about = "Global-in-time domain decomposition solvers for a Stokes/elastodynamics system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Manufactured-solution accuracy run on two stacked unit squares.
    Mms(CommonArgs),
    /// Pressure-pulse channel benchmark (Steklov-Poincare method).
    Hemo(CommonArgs),
    /// Halving convergence study in space or time.
    Study(StudyArgs),
    /// Self-verification suite (exits nonzero on any failing check).
    Verify(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Interface solver: sp | robin_gmres | robin_swr.
    #[arg(long)]
    method: Option<String>,
    /// Element pair: taylor_hood_p2 | mini_p1.
    #[arg(long)]
    elements: Option<String>,
    /// Mesh size (1/n for mms, h_y for hemo).
    #[arg(long)]
    h: Option<f64>,
    /// Fluid time step.
    #[arg(long)]
    dt_f: Option<f64>,
    /// Structure time step.
    #[arg(long)]
    dt_s: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Fluid Robin weight.
    #[arg(long)]
    alpha_f: Option<f64>,
    /// Structure Robin weight.
    #[arg(long)]
    alpha_s: Option<f64>,
    /// Interface solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Maximum interface iterations.
    #[arg(long)]
    maxit: Option<usize>,
    /// Output directory for the CSV reports.
    #[arg(long)]
    outdir: Option<PathBuf>,
    /// Flat key=value file carrying exactly the RunConfig keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct StudyArgs {
    /// Study axis: space | time.
    #[arg(long, default_value = "space")]
    axis: String,
    /// Number of halving levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_method(s: &str) -> Result<SolverMethod, String> {
    match s {
        "sp" => Ok(SolverMethod::Sp),
        "robin_gmres" => Ok(SolverMethod::RobinGmres),
        "robin_swr" => Ok(SolverMethod::RobinSwr),
        other => Err(format!("unknown method `{other}`")),
    }
}

fn parse_elements(s: &str) -> Result<ElementSet, String> {
    match s {
        "taylor_hood_p2" => Ok(ElementSet::TaylorHoodP2),
        "mini_p1" => Ok(ElementSet::MiniP1),
        other => Err(format!("unknown element set `{other}`")),
    }
}

fn parse_case(s: &str) -> Result<Case, String> {
    match s {
        "mms" => Ok(Case::Mms),
        "hemo" => Ok(Case::Hemo),
        "verify" => Ok(Case::Verify),
        other => Err(format!("unknown case `{other}`")),
    }
}

/// Applies a flat `key=value` config file; keys are exactly the RunConfig
/// fields. The file's `case` must agree with the subcommand.
fn apply_config_file(cfg: &mut RunConfig, path: &PathBuf) -> Result<(), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_f64 =
            |v: &str| -> Result<f64, String> { v.parse().map_err(|e| format!("{key}: {e}")) };
        match key {
            "case" => {
                let file_case = parse_case(value)?;
                if file_case != cfg.case {
                    return Err(format!(
                        "config file case `{value}` conflicts with the subcommand"
                    ));
                }
            }
            "method" => cfg.method = parse_method(value)?,
            "elements" => cfg.elements = parse_elements(value)?,
            "h" => cfg.h = parse_f64(value)?,
            "dt_f" => cfg.dt_f = parse_f64(value)?,
            "dt_s" => cfg.dt_s = parse_f64(value)?,
            "T" => cfg.t_end = parse_f64(value)?,
            "alpha_f" => cfg.alpha_f = parse_f64(value)?,
            "alpha_s" => cfg.alpha_s = parse_f64(value)?,
            "tol" => cfg.tol = parse_f64(value)?,
            "maxit" => {
                cfg.maxit = value.parse().map_err(|e| format!("maxit: {e}"))?;
            }
            "outdir" => cfg.outdir = PathBuf::from(value),
            other => return Err(format!("unknown config key `{other}`")),
        }
    }
    Ok(())
}

fn build_config(case: Case, args: &CommonArgs) -> Result<RunConfig, String> {
    let mut cfg = match case {
        Case::Hemo => RunConfig::hemo_defaults(),
        _ => {
            let mut c = RunConfig::mms_defaults();
            c.case = case;
            c
        }
    };
    if let Some(path) = &args.config {
        apply_config_file(&mut cfg, path)?;
    }
    if let Some(m) = &args.method {
        cfg.method = parse_method(m)?;
    }
    if let Some(e) = &args.elements {
        cfg.elements = parse_elements(e)?;
    }
    if let Some(v) = args.h {
        cfg.h = v;
    }
    if let Some(v) = args.dt_f {
        cfg.dt_f = v;
    }
    if let Some(v) = args.dt_s {
        cfg.dt_s = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.alpha_f {
        cfg.alpha_f = v;
    }
    if let Some(v) = args.alpha_s {
        cfg.alpha_s = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.maxit {
        cfg.maxit = v;
    }
    if let Some(v) = &args.outdir {
        cfg.outdir = v.clone();
    }
    Ok(cfg)
}

fn write_reports(cfg: &RunConfig, rows: &[(RunConfig, ErrorReport)]) -> std::io::Result<()> {
    fs::create_dir_all(&cfg.outdir)?;
    let mut errors = String::from(ERRORS_CSV_HEADER);
    for (c, r) in rows {
        errors.push('\n');
        errors.push_str(&errors_csv_row(c, r));
    }
    errors.push('\n');
    fs::write(cfg.outdir.join("errors.csv"), errors)?;
    if let Some((_, last)) = rows.last() {
        fs::write(
            cfg.outdir.join("residuals.csv"),
            residuals_csv_rows(&last.residual_history),
        )?;
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Mms(args) => {
            let cfg = build_config(Case::Mms, &args)?;
            let report = run_mms(&cfg).map_err(|e| e.to_string())?;
            println!(
                "u: L2 {:.5e}  H1 {:.5e}\np: L2 {:.5e}\neta: L2 {:.5e}  H1 {:.5e}",
                report.err_u_l2,
                report.err_u_h1,
                report.err_p_l2,
                report.err_eta_l2,
                report.err_eta_h1
            );
            println!(
                "iterations {} (converged: {}), solve wall time {:.3} s, interface velocity error {:.5e}",
                report.iters, report.converged, report.wall_s, report.iface_err
            );
            write_reports(&cfg, &[(cfg.clone(), report.clone())]).map_err(|e| e.to_string())?;
            println!("wrote {:?}", cfg.outdir.join("errors.csv"));
            Ok(if report.converged { 0 } else { 1 })
        }
        Command::Hemo(args) => {
            let cfg = build_config(Case::Hemo, &args)?;
            let hemo = run_hemodynamics(&cfg).map_err(|e| e.to_string())?;
            println!(
                "iterations {} (converged: {}), solve wall time {:.3} s",
                hemo.report.iters, hemo.report.converged, hemo.report.wall_s
            );
            println!(
                "interface velocity error at T: {:.5e}",
                hemo.report.iface_err
            );
            write_reports(&cfg, &[(cfg.clone(), hemo.report.clone())])
                .map_err(|e| e.to_string())?;
            fs::write(
                cfg.outdir.join("displacement.csv"),
                displacement_csv_rows(&hemo.displacement),
            )
            .map_err(|e| e.to_string())?;
            println!(
                "wrote {:?} and {:?}",
                cfg.outdir.join("errors.csv"),
                cfg.outdir.join("displacement.csv")
            );
            Ok(if hemo.report.converged { 0 } else { 1 })
        }
        Command::Study(args) => {
            let axis = match args.axis.as_str() {
                "space" => StudyAxis::Space,
                "time" => StudyAxis::Time,
                other => return Err(format!("unknown study axis `{other}`")),
            };
            let cfg = build_config(Case::Mms, &args.common)?;
            let rows =
                run_convergence_study(&cfg, axis, args.levels).map_err(|e| e.to_string())?;
            println!(
                "{:<20} {:>9} {:>10} {:>11} {:>11} {:>11} {:>11} {:>11} {:>6}",
                "family", "h", "dt_f", "u_L2", "u_H1", "p_L2", "eta_L2", "eta_H1", "iters"
            );
            let mut csv_rows = Vec::new();
            for row in &rows {
                let r = &row.report;
                let rate = row
                    .rates
                    .map(|r| {
                        format!(
                            "  rates [{:.2} {:.2} {:.2} {:.2} {:.2}]",
                            r[0], r[1], r[2], r[3], r[4]
                        )
                    })
                    .unwrap_or_default();
                println!(
                    "{:<20} {:>9.4} {:>10.3e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>6}{rate}",
                    row.family,
                    row.h,
                    row.dt_f,
                    r.err_u_l2,
                    r.err_u_h1,
                    r.err_p_l2,
                    r.err_eta_l2,
                    r.err_eta_h1,
                    r.iters
                );
                let mut c = cfg.clone();
                c.h = row.h;
                c.dt_f = row.dt_f;
                c.dt_s = row.dt_s;
                csv_rows.push((c, r.clone()));
            }
            write_reports(&cfg, &csv_rows).map_err(|e| e.to_string())?;
            println!("wrote {:?}", cfg.outdir.join("errors.csv"));
            Ok(0)
        }
        Command::Verify(args) => {
            let _cfg = build_config(Case::Verify, &args)?;
            let report = run_verification(None).map_err(|e| e.to_string())?;
            for check in &report.checks {
                println!(
                    "{} {} - {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if report.ok() {
                println!("all checks passed");
                Ok(0)
            } else {
                println!("{} check(s) failed", report.failures().len());
                Ok(1)
            }
        }
    }
}
