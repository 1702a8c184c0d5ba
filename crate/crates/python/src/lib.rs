//! Python bindings. Matrices travel as lists of lists of `complex`.

use bifrac::bifrac::{self as bf, BifracAngles};
use bifrac::fock::FockOperator;
use bifrac::fracft::{self, FracAngle, SampledFunction};
use bifrac::phasespace::{self, FunctionKind, GridAxes};
use bifrac::quadrature::{QuadratureSettings, UniformGrid};
use bifrac::states;
use bifrac::verify::{self, VerifyConfig};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(bifrac_py, BifracError, PyValueError);

fn err(e: bifrac::Error) -> PyErr {
    BifracError::new_err(format!("{}: {e}", e.name()))
}

fn angles(theta_alpha: f64, theta_beta: f64) -> PyResult<BifracAngles> {
    BifracAngles::new(theta_alpha, theta_beta).map_err(err)
}

fn rows(op: &FockOperator) -> Vec<Vec<C64>> {
    op.matrix().outer_iter().map(|r| r.to_vec()).collect()
}

fn operator(rows: Vec<Vec<C64>>) -> PyResult<FockOperator> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("operator must be a square list of rows"));
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    let m = Array2::from_shape_vec((n, n), flat).expect("square shape checked");
    FockOperator::new(m).map_err(err)
}

/// Kernel of the fractional Fourier transform at `(x, y)`.
#[pyfunction]
fn kernel_value(x: f64, y: f64, theta: f64) -> PyResult<C64> {
    fracft::kernel_value(x, y, FracAngle::new(theta)).map_err(err)
}

/// `∫dy Δ(x,y;θ₁)Δ(y,z;θ₂)` by certified quadrature.
#[pyfunction]
fn compose_kernels(theta1: f64, theta2: f64, x: f64, z: f64) -> PyResult<C64> {
    fracft::compose_kernels(
        FracAngle::new(theta1),
        FracAngle::new(theta2),
        x,
        z,
        &QuadratureSettings::default(),
    )
    .map_err(err)
}

/// Transform samples on `linspace(xmin, xmax, len(values))`.
#[pyfunction]
fn apply_fracft(values: Vec<C64>, xmin: f64, xmax: f64, theta: f64) -> PyResult<Vec<C64>> {
    let grid = UniformGrid::linspace(xmin, xmax, values.len()).map_err(err)?;
    let f = SampledFunction::new(grid, values).map_err(err)?;
    let g = fracft::apply_fracft(&f, FracAngle::new(theta)).map_err(err)?;
    Ok(g.values().to_vec())
}

/// `(τ, σ, φ)` of the operator-product form.
#[pyfunction]
fn bto_params(alpha: f64, beta: f64, theta_alpha: f64, theta_beta: f64) -> PyResult<(f64, f64, f64)> {
    let p = bf::bto_params(alpha, beta, angles(theta_alpha, theta_beta)?).map_err(err)?;
    Ok((p.tau, p.sigma, p.phi))
}

/// `U(α,β;θα,θβ)` truncated to `dim`, with `(trusted, trusted_dim)`.
#[pyfunction]
fn bifrac_operator(
    alpha: f64,
    beta: f64,
    theta_alpha: f64,
    theta_beta: f64,
    dim: usize,
) -> PyResult<(Vec<Vec<C64>>, bool, usize)> {
    let (u, report) = bf::bifrac_operator(alpha, beta, angles(theta_alpha, theta_beta)?, dim).map_err(err)?;
    Ok((rows(&u), report.trusted, report.trusted_dim))
}

/// Number-basis amplitudes of `|α,β;θα,θβ⟩`.
#[pyfunction]
fn bifrac_coherent(alpha: f64, beta: f64, theta_alpha: f64, theta_beta: f64, dim: usize) -> PyResult<Vec<C64>> {
    let (psi, _) = states::bifrac_coherent(alpha, beta, angles(theta_alpha, theta_beta)?, dim).map_err(err)?;
    Ok(psi.amplitudes().to_vec())
}

/// Rows `(θα, σpp, ⟨n⟩, g², Σ|aₙ|², RS residual)` at `θβ = 0`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, thetas, n_max = states::DEFAULT_N_MAX))]
fn theta_alpha_sweep(
    alpha: f64,
    beta: f64,
    thetas: Vec<f64>,
    n_max: usize,
) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64)>> {
    let rows = states::theta_alpha_sweep(alpha, beta, &thetas, n_max, &QuadratureSettings::default()).map_err(err)?;
    Ok(rows
        .iter()
        .map(|r| (r.theta_alpha, r.sigma_pp, r.mean_n, r.g2, r.norm_captured, r.rs_residual))
        .collect())
}

/// Phase-space function of `operator` on the square grid
/// `linspace(lo, hi, count)²`, indexed `[alpha][beta]`.
#[pyfunction]
#[pyo3(signature = (kind, operator_rows, lo, hi, count, theta_alpha = None, theta_beta = None))]
#[allow(clippy::too_many_arguments)]
fn phase_space_grid(
    kind: &str,
    operator_rows: Vec<Vec<C64>>,
    lo: f64,
    hi: f64,
    count: usize,
    theta_alpha: Option<f64>,
    theta_beta: Option<f64>,
) -> PyResult<(Vec<Vec<C64>>, bool)> {
    let kind: FunctionKind = kind.parse().map_err(err)?;
    let theta = operator(operator_rows)?;
    let axes = GridAxes::square(UniformGrid::linspace(lo, hi, count).map_err(err)?);
    let pair = match (theta_alpha, theta_beta) {
        (Some(a), Some(b)) => Some(angles(a, b)?),
        (None, None) => None,
        _ => return Err(PyValueError::new_err("give both angles or neither")),
    };
    let need = || pair.ok_or_else(|| PyValueError::new_err(format!("{} needs angles", kind.name())));
    let grid = match kind {
        FunctionKind::Weyl => phasespace::weyl_function(&theta, &axes),
        FunctionKind::Wigner => phasespace::wigner_function(&theta, &axes),
        FunctionKind::BifracWigner => phasespace::bifrac_wigner_function(&theta, &axes, need()?),
        FunctionKind::Q => phasespace::q_function(&theta, &axes, pair.unwrap_or(angles(
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
        )?)),
        FunctionKind::BifracQ => phasespace::q_function(&theta, &axes, need()?),
        FunctionKind::BifracP => {
            phasespace::bifrac_p_grid(&theta, &axes, need()?, &phasespace::PSettings::default())
        }
    }
    .map_err(err)?;
    let values = grid.values.outer_iter().map(|r| r.to_vec()).collect();
    Ok((values, grid.trusted))
}

/// Run the invariant checks; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (dim = 64, seed = 0, only = None))]
fn run_verify(dim: usize, seed: u64, only: Option<Vec<String>>) -> PyResult<String> {
    let config = VerifyConfig {
        dim,
        seed,
        only: only.unwrap_or_default(),
        ..VerifyConfig::default()
    };
    Ok(verify::run(&config).map_err(err)?.to_json())
}

#[pymodule]
fn bifrac_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BifracError", m.py().get_type::<BifracError>())?;
    m.add_function(wrap_pyfunction!(kernel_value, m)?)?;
    m.add_function(wrap_pyfunction!(compose_kernels, m)?)?;
    m.add_function(wrap_pyfunction!(apply_fracft, m)?)?;
    m.add_function(wrap_pyfunction!(bto_params, m)?)?;
    m.add_function(wrap_pyfunction!(bifrac_operator, m)?)?;
    m.add_function(wrap_pyfunction!(bifrac_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(theta_alpha_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(phase_space_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
