use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use bifrac::bifrac::BifracAngles;
use bifrac::fock::EDGE_EPS;
use bifrac::format::{fmt17, fmt5, fmt_complex5, Sig17};
use bifrac::fracft::{compose_kernels, kernel_value, FracAngle};
use bifrac::phasespace::{self, FunctionKind, GridAxes, PSettings, PhaseSpaceGrid};
use bifrac::quadrature::QuadratureSettings;
use bifrac::states::{self, SweepRow};
use bifrac::verify::{self, Status, VerifyConfig};
use serde::Serialize;

use crate::parse::{self, OpError};
use crate::{Failure, Format, GridArgs, KernelArgs, StateStatsArgs, VerifyArgs};

/// Largest deviation `--verify-oracle` accepts.
const ORACLE_TOL: f64 = 2e-3;

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn kernel(args: &KernelArgs) -> Result<(), Failure> {
    if let Some(pair) = &args.compose {
        let (t1, t2) = (FracAngle::new(pair[0]), FracAngle::new(pair[1]));
        let quad = compose_kernels(t1, t2, args.x, args.z, &QuadratureSettings::default())?;
        let closed = kernel_value(args.x, args.z, t1 + t2)?;
        println!("composed    {}", fmt_complex5(quad.re, quad.im));
        println!("closed-form {}", fmt_complex5(closed.re, closed.im));
        return Ok(());
    }
    let theta = args.theta.expect("clap requires --theta without --compose");
    let k = kernel_value(args.x, args.y, FracAngle::new(theta))?;
    println!("{}", fmt_complex5(k.re, k.im));
    Ok(())
}

fn coherent_row(args: &StateStatsArgs, theta_alpha: f64) -> Result<SweepRow, Failure> {
    let angles = BifracAngles::new(theta_alpha, args.theta_beta)?;
    let (state, report) = states::bifrac_coherent(args.alpha, args.beta, angles, args.fock_dim)?;
    if !report.trusted && !args.allow_untrusted {
        return Err(Failure::Untrusted(format!(
            "state at θα={theta_alpha} is untrusted at --fock-dim {} (edge weight {:.1e}); \
             raise --fock-dim or pass --allow-untrusted",
            args.fock_dim, report.edge_weight
        )));
    }
    let m = states::moments_from_state(&state)?;
    let stats = states::photon_stats_from_state(&state, args.n_max.min(args.fock_dim - 1))?;
    Ok(SweepRow {
        theta_alpha,
        sigma_pp: m.spp,
        mean_n: stats.mean_n,
        g2: stats.g2,
        norm_captured: stats.norm_captured,
        rs_residual: m.rs_residual(),
        moments: m,
    })
}

#[derive(Serialize)]
struct RowJson {
    theta_alpha: Sig17,
    theta_beta: Sig17,
    sigma_xx: Sig17,
    sigma_pp: Sig17,
    sigma_xp: Sig17,
    mean_n: Sig17,
    g2: Sig17,
    norm_captured: Sig17,
    rs_residual: Sig17,
}

pub fn state_stats(args: &StateStatsArgs) -> Result<(), Failure> {
    let thetas = match (&args.sweep_theta_alpha, args.theta_alpha) {
        (Some(s), _) => parse::sweep(s).map_err(Failure::Usage)?,
        (None, Some(t)) => vec![t],
        (None, None) => unreachable!("clap requires one of the angle options"),
    };
    if args.n_max < 10 {
        return Err(Failure::Usage(format!("--n-max {} is below 10", args.n_max)));
    }
    if args.fock_dim < 4 {
        return Err(Failure::Usage(format!("--fock-dim {} is below 4", args.fock_dim)));
    }
    for &t in &thetas {
        BifracAngles::new(t, args.theta_beta)?;
    }
    let rows = if args.theta_beta == 0.0 {
        states::theta_alpha_sweep(args.alpha, args.beta, &thetas, args.n_max, &QuadratureSettings::default())?
    } else {
        thetas
            .iter()
            .map(|&t| coherent_row(args, t))
            .collect::<Result<Vec<_>, _>>()?
    };
    let text = match args.format {
        Format::Csv => states::sweep_csv(&rows, args.with_check),
        Format::Json => {
            let doc: Vec<RowJson> = rows
                .iter()
                .map(|r| RowJson {
                    theta_alpha: Sig17(r.theta_alpha),
                    theta_beta: Sig17(args.theta_beta),
                    sigma_xx: Sig17(r.moments.sxx),
                    sigma_pp: Sig17(r.sigma_pp),
                    sigma_xp: Sig17(r.moments.sxp),
                    mean_n: Sig17(r.mean_n),
                    g2: Sig17(r.g2),
                    norm_captured: Sig17(r.norm_captured),
                    rs_residual: Sig17(r.rs_residual),
                })
                .collect();
            serde_json::to_string_pretty(&doc).expect("rows serialize") + "\n"
        }
    };
    emit(&text, args.output.as_deref())
}

fn grid_angles(args: &GridArgs) -> Result<Option<BifracAngles>, Failure> {
    let given = match (&args.angles, args.theta_alpha, args.theta_beta) {
        (Some(v), _, _) => Some((v[0], v[1])),
        (None, Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    let needs = matches!(
        args.kind,
        FunctionKind::BifracWigner | FunctionKind::BifracQ | FunctionKind::BifracP
    );
    match (given, args.kind) {
        (Some((a, b)), FunctionKind::Weyl | FunctionKind::Wigner) => Err(Failure::Usage(format!(
            "--kind {} takes no angles (got {a}, {b})",
            args.kind.name()
        ))),
        (Some((a, b)), _) => Ok(Some(parse::angles(a, b)?)),
        (None, FunctionKind::Q) => Ok(Some(parse::angles(FRAC_PI_2, FRAC_PI_2)?)),
        (None, _) if needs => Err(Failure::Usage(format!(
            "--kind {} needs --angles or --theta-alpha/--theta-beta",
            args.kind.name()
        ))),
        (None, _) => Ok(None),
    }
}

/// Grid values against the quadrature oracle at the quartile points.
fn oracle_deviation(
    grid: &PhaseSpaceGrid,
    theta: &bifrac::fock::FockOperator,
    angles: BifracAngles,
) -> Result<(f64, usize), Failure> {
    let pick = |n: usize| [n / 4, n / 2, (3 * n) / 4];
    let mut worst = 0.0f64;
    let mut count = 0;
    for i in pick(grid.alpha_axis.len()) {
        for j in pick(grid.beta_axis.len()) {
            let (a, b) = (grid.alpha_axis.point(i), grid.beta_axis.point(j));
            let oracle = phasespace::bifrac_wigner_oracle(theta, a, b, angles)?;
            worst = worst.max((grid.get(i, j) - oracle).norm());
            count += 1;
        }
    }
    Ok((worst, count))
}

pub fn grid(args: &GridArgs) -> Result<(), Failure> {
    if args.fock_dim < 4 {
        return Err(Failure::Usage(format!("--fock-dim {} is below 4", args.fock_dim)));
    }
    if args.verify_oracle && args.kind != FunctionKind::BifracWigner {
        return Err(Failure::Usage("--verify-oracle applies to --kind bifrac-wigner".into()));
    }
    let alpha = parse::axis(&args.range).map_err(Failure::Usage)?;
    let beta = match &args.beta_range {
        Some(r) => parse::axis(r).map_err(Failure::Usage)?,
        None => alpha,
    };
    let axes = GridAxes { alpha, beta };
    let angles = grid_angles(args)?;
    let (theta, lost) = parse::operator(&args.op, args.fock_dim).map_err(|e| match e {
        OpError::Usage(m) => Failure::Usage(m),
        OpError::Numeric(e) => Failure::Numeric(e),
    })?;

    let mut grid = match args.kind {
        FunctionKind::Weyl => phasespace::weyl_function(&theta, &axes)?,
        FunctionKind::Wigner => phasespace::wigner_function(&theta, &axes)?,
        FunctionKind::BifracWigner => {
            phasespace::bifrac_wigner_function(&theta, &axes, angles.expect("checked above"))?
        }
        FunctionKind::Q | FunctionKind::BifracQ => {
            phasespace::q_function(&theta, &axes, angles.expect("checked above"))?
        }
        FunctionKind::BifracP => {
            let settings = PSettings {
                step: args.p_step,
                ..PSettings::default()
            };
            phasespace::bifrac_p_grid(&theta, &axes, angles.expect("checked above"), &settings)?
        }
    };
    grid.trusted &= lost <= EDGE_EPS;
    if !grid.trusted && !args.allow_untrusted {
        return Err(Failure::Untrusted(format!(
            "{} grid is untrusted at --fock-dim {}; raise --fock-dim or pass --allow-untrusted",
            grid.kind.name(),
            args.fock_dim
        )));
    }
    let text = match args.format {
        Format::Csv => grid.to_csv(),
        Format::Json => grid.to_json() + "\n",
    };
    emit(&text, args.output.as_deref())?;

    if args.verify_oracle {
        let (worst, count) = oracle_deviation(&grid, &theta, angles.expect("checked above"))?;
        let verdict = if worst < ORACLE_TOL { "pass" } else { "FAIL" };
        eprintln!(
            "oracle: max deviation {} over {count} points (tolerance {}): {verdict}",
            fmt5(worst),
            fmt5(ORACLE_TOL)
        );
        if worst >= ORACLE_TOL {
            return Err(Failure::Verification(format!(
                "oracle deviation {} ≥ {}",
                fmt17(worst),
                fmt5(ORACLE_TOL)
            )));
        }
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    if args.list {
        return emit(&(verify::check_names().join("\n") + "\n"), args.output.as_deref());
    }
    let config = VerifyConfig {
        dim: args.n,
        seed: args.seed,
        only: args.only.clone(),
        oracle_points: args.oracle_points,
    };
    let report = verify::run(&config).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&(report.to_json() + "\n"), args.output.as_deref())?;
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status != Status::Pass)
        .map(|c| c.check_name)
        .collect();
    eprintln!(
        "verify: {} of {} checks passed",
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}
