//! Weyl, Wigner, bifractional Wigner, Q and P functions of an operator
//! `Θ`, pointwise and on grids.

pub mod pfunc;

use std::f64::consts::PI;

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifrac::{bifrac_gaussian_defining, bifrac_operator_integral, oracle_settings, BifracAngles, SpecialCase};
use crate::error::{Error, Result};
use crate::fock::hermite::displacement_elements;
use crate::fock::{interior_dim, FockOperator, EDGE_EPS, MIN_DIM};
use crate::format::Sig17;
use crate::quadrature::{QuadratureSettings, UniformGrid};
use crate::states::bifrac_coherent;

pub use pfunc::{bifrac_p_function, bifrac_p_grid, PSettings, PValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Weyl,
    Wigner,
    BifracWigner,
    Q,
    BifracQ,
    BifracP,
}

impl FunctionKind {
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Weyl => "weyl",
            FunctionKind::Wigner => "wigner",
            FunctionKind::BifracWigner => "bifrac-wigner",
            FunctionKind::Q => "q",
            FunctionKind::BifracQ => "bifrac-q",
            FunctionKind::BifracP => "bifrac-p",
        }
    }

    /// Real for Hermitian `Θ`.
    pub fn is_real(self) -> bool {
        matches!(self, FunctionKind::Wigner | FunctionKind::Q | FunctionKind::BifracQ | FunctionKind::BifracP)
    }
}

impl std::str::FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "weyl" => FunctionKind::Weyl,
            "wigner" => FunctionKind::Wigner,
            "bifrac-wigner" => FunctionKind::BifracWigner,
            "q" => FunctionKind::Q,
            "bifrac-q" => FunctionKind::BifracQ,
            "bifrac-p" => FunctionKind::BifracP,
            other => return Err(Error::Invalid(format!("unknown function kind `{other}`"))),
        })
    }
}

/// Values on `alpha_axis × beta_axis`; `values[[i, j]]` belongs to
/// `(alpha_axis.point(i), beta_axis.point(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub alpha_axis: UniformGrid,
    pub beta_axis: UniformGrid,
    pub values: Array2<C64>,
    pub kind: FunctionKind,
    pub angles: Option<BifracAngles>,
    pub fock_dim: usize,
    pub trusted: bool,
}

#[derive(Serialize)]
struct AxisJson {
    min: Sig17,
    max: Sig17,
    count: usize,
}

#[derive(Serialize)]
struct AxesJson {
    alpha: AxisJson,
    beta: AxisJson,
}

#[derive(Serialize)]
struct GridJson<'a> {
    axes: AxesJson,
    kind: &'a str,
    angles: Option<[Sig17; 2]>,
    fock_dim: usize,
    trusted: bool,
    values: Vec<[Sig17; 2]>,
}

impl PhaseSpaceGrid {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[[i, j]]
    }

    /// Largest `|Im|` over the grid.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.alpha_axis.len() {
            let wi = self.alpha_axis.trapezoid_weight(i);
            for j in 0..self.beta_axis.len() {
                acc += self.values[[i, j]] * (wi * self.beta_axis.trapezoid_weight(j));
            }
        }
        acc
    }

    /// `alpha,beta,re,im`, one line per point, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,re,im\n");
        for i in 0..self.alpha_axis.len() {
            for j in 0..self.beta_axis.len() {
                let v = self.values[[i, j]];
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    crate::format::fmt17(self.alpha_axis.point(i)),
                    crate::format::fmt17(self.beta_axis.point(j)),
                    crate::format::fmt17(v.re),
                    crate::format::fmt17(v.im)
                ));
            }
        }
        out
    }

    /// `{axes, kind, angles, fock_dim, trusted, values}` with values in
    /// row-major (alpha-major) order.
    pub fn to_json(&self) -> String {
        let axis = |g: &UniformGrid| AxisJson {
            min: Sig17(g.start()),
            max: Sig17(g.end()),
            count: g.len(),
        };
        let doc = GridJson {
            axes: AxesJson {
                alpha: axis(&self.alpha_axis),
                beta: axis(&self.beta_axis),
            },
            kind: self.kind.name(),
            angles: self
                .angles
                .map(|a| [Sig17(a.theta_alpha()), Sig17(a.theta_beta())]),
            fock_dim: self.fock_dim,
            trusted: self.trusted,
            values: self.values.iter().map(|v| [Sig17(v.re), Sig17(v.im)]).collect(),
        };
        serde_json::to_string(&doc).expect("grid values serialize")
    }
}

/// `Σ |Θ_mn|` over entries with `max(m, n) ≥ ⌊0.9N⌋`.
pub fn operator_edge_weight(theta: &FockOperator) -> f64 {
    let n = theta.dim();
    let start = interior_dim(n);
    let m = theta.matrix();
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r >= start || c >= start {
                acc += m[[r, c]].norm();
            }
        }
    }
    acc
}

/// `Θ` cut to the block that holds all of its nonzero entries.
fn support_block(theta: &FockOperator) -> Array2<C64> {
    let k = theta.support_dim().max(MIN_DIM).min(theta.dim());
    theta.matrix().slice(s![..k, ..k]).to_owned()
}

/// `Tr(Θ M)` for `Θ` and `M` of equal size.
fn trace_product(theta: &Array2<C64>, m: &Array2<C64>) -> C64 {
    let k = theta.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..k {
        for b in 0..k {
            acc += theta[[a, b]] * m[[b, a]];
        }
    }
    acc
}

fn weyl_block(block: &Array2<C64>, alpha: f64, beta: f64) -> C64 {
    trace_product(block, &displacement_elements(alpha, beta, block.nrows()))
}

fn wigner_block(block: &Array2<C64>, alpha: f64, beta: f64) -> C64 {
    let mut d = displacement_elements(alpha, beta, block.nrows());
    for (j, mut col) in d.columns_mut().into_iter().enumerate() {
        if j % 2 == 1 {
            col.mapv_inplace(|v| -v);
        }
    }
    trace_product(block, &d)
}

/// `W̃(α,β|Θ) = Tr[Θ D(α,β)]` with exact displacement elements.
pub fn weyl_value(theta: &FockOperator, alpha: f64, beta: f64) -> C64 {
    weyl_block(&support_block(theta), alpha, beta)
}

/// `W(α,β|Θ) = Tr[Θ Π(α,β)]` with exact displacement elements.
pub fn wigner_value(theta: &FockOperator, alpha: f64, beta: f64) -> C64 {
    wigner_block(&support_block(theta), alpha, beta)
}

fn bifrac_wigner_block(block: &Array2<C64>, alpha: f64, beta: f64, angles: BifracAngles) -> Result<C64> {
    if let Some(case) = angles.special_case() {
        return Ok(match case {
            SpecialCase::ZeroZero => weyl_block(block, beta, -alpha),
            SpecialCase::HalfHalf => wigner_block(block, alpha, beta),
            SpecialCase::PiPi => weyl_block(block, -beta, alpha),
            SpecialCase::MinusHalfMinusHalf => wigner_block(block, -alpha, -beta),
        });
    }
    let (g, g00) = bifrac_gaussian_defining(alpha, beta, angles)?;
    let (u, _) = g.fock_elements(g00, block.nrows())?;
    Ok(trace_product(block, &u))
}

/// `A(α,β;θα,θβ|Θ) = Tr[Θ U(α,β;θα,θβ)]`. Special pairs are dispatched to
/// the relabelled Weyl or Wigner value.
pub fn bifrac_wigner(theta: &FockOperator, alpha: f64, beta: f64, angles: BifracAngles) -> Result<C64> {
    bifrac_wigner_block(&support_block(theta), alpha, beta, angles)
}

/// `A` from its defining double fractional transform of the Weyl function,
/// by way of the quadrature oracle for `U` on the support of `Θ`.
pub fn bifrac_wigner_oracle(theta: &FockOperator, alpha: f64, beta: f64, angles: BifracAngles) -> Result<C64> {
    let block = support_block(theta);
    let k = block.nrows();
    let settings = oracle_settings(alpha, beta, angles, k);
    let r = bifrac_operator_integral(alpha, beta, angles, k, &settings)?;
    Ok(trace_product(&block, r.operator.matrix()))
}

/// `(W(α,β), (1/2π)∬W̃(α',β')e^{i(βα'−β'α)}dα'dβ')`, the right side by
/// certified trapezoid quadrature.
pub fn fourier_relation_check(
    theta: &FockOperator,
    point: (f64, f64),
    settings: &QuadratureSettings,
) -> Result<(C64, C64)> {
    settings.validate()?;
    let (alpha, beta) = point;
    let block = support_block(theta);
    let k = block.nrows() as f64;
    let mut half = settings.half_width.unwrap_or(6f64.max(3.0 + 2.0 * k.sqrt()));
    let mut step = settings.step;
    let round = |half: f64, step: f64| -> Result<C64> {
        let grid = UniformGrid::symmetric(half, step)?;
        let rows: Vec<C64> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let a = grid.point(i);
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..grid.len() {
                    let b = grid.point(j);
                    let w = grid.trapezoid_weight(i) * grid.trapezoid_weight(j);
                    acc += weyl_block(&block, a, b) * C64::from_polar(w, beta * a - b * alpha);
                }
                acc
            })
            .collect();
        Ok(rows.into_iter().sum::<C64>() / (2.0 * PI))
    };
    let mut prev = round(half, step)?;
    let mut change = f64::INFINITY;
    for _ in 0..settings.max_doublings.max(1) {
        half *= settings.growth;
        step /= 2.0;
        let next = round(half, step)?;
        change = (next - prev).norm();
        prev = next;
        if change < settings.tol {
            return Ok((wigner_block(&block, alpha, beta), prev));
        }
    }
    Err(Error::QuadratureDivergence {
        what: "Weyl-to-Wigner Fourier transform",
        change,
        tail: 0.0,
    })
}

/// Axis pair for grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxes {
    pub alpha: UniformGrid,
    pub beta: UniformGrid,
}

impl GridAxes {
    pub fn square(axis: UniformGrid) -> Self {
        Self { alpha: axis, beta: axis }
    }
}

fn evaluate(
    axes: &GridAxes,
    f: impl Fn(f64, f64) -> Result<C64> + Sync,
) -> Result<Array2<C64>> {
    let (na, nb) = (axes.alpha.len(), axes.beta.len());
    let rows: Vec<Result<Vec<C64>>> = (0..na)
        .into_par_iter()
        .map(|i| {
            let a = axes.alpha.point(i);
            (0..nb).map(|j| f(a, axes.beta.point(j))).collect()
        })
        .collect();
    let mut out = Array2::<C64>::zeros((na, nb));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

fn grid(
    theta: &FockOperator,
    axes: &GridAxes,
    kind: FunctionKind,
    angles: Option<BifracAngles>,
    values: Array2<C64>,
    trusted: bool,
) -> PhaseSpaceGrid {
    PhaseSpaceGrid {
        alpha_axis: axes.alpha,
        beta_axis: axes.beta,
        values,
        kind,
        angles,
        fock_dim: theta.dim(),
        trusted: trusted && operator_edge_weight(theta) < EDGE_EPS,
    }
}

pub fn weyl_function(theta: &FockOperator, axes: &GridAxes) -> Result<PhaseSpaceGrid> {
    let block = support_block(theta);
    let v = evaluate(axes, |a, b| Ok(weyl_block(&block, a, b)))?;
    Ok(grid(theta, axes, FunctionKind::Weyl, None, v, true))
}

pub fn wigner_function(theta: &FockOperator, axes: &GridAxes) -> Result<PhaseSpaceGrid> {
    let block = support_block(theta);
    let v = evaluate(axes, |a, b| Ok(wigner_block(&block, a, b)))?;
    Ok(grid(theta, axes, FunctionKind::Wigner, None, v, true))
}

pub fn bifrac_wigner_function(theta: &FockOperator, axes: &GridAxes, angles: BifracAngles) -> Result<PhaseSpaceGrid> {
    let block = support_block(theta);
    let v = evaluate(axes, |a, b| bifrac_wigner_block(&block, a, b, angles))?;
    Ok(grid(theta, axes, FunctionKind::BifracWigner, Some(angles), v, true))
}

/// `Q(α,β;θα,θβ|Θ) = ⟨α,β;θα,θβ|Θ|α,β;θα,θβ⟩` with the coherent states
/// truncated to `Θ`'s dimension. The kind is `Q` at `(π/2, π/2)`.
pub fn q_function(theta: &FockOperator, axes: &GridAxes, angles: BifracAngles) -> Result<PhaseSpaceGrid> {
    let dim = theta.dim();
    let kind = if angles.special_case() == Some(SpecialCase::HalfHalf) {
        FunctionKind::Q
    } else {
        FunctionKind::BifracQ
    };
    let trusted = std::sync::atomic::AtomicBool::new(true);
    let v = evaluate(axes, |a, b| {
        let (psi, report) = bifrac_coherent(a, b, angles, dim)?;
        if !report.trusted {
            trusted.store(false, std::sync::atomic::Ordering::Relaxed);
        }
        psi.expectation(theta)
    })?;
    Ok(grid(theta, axes, kind, Some(angles), v, trusted.into_inner()))
}

/// `(1/2π)∬Q dαdβ` on a square grid, the left side of the trace identity.
pub fn q_trace_integral(theta: &FockOperator, angles: BifracAngles, axis: UniformGrid) -> Result<C64> {
    let q = q_function(theta, &GridAxes::square(axis), angles)?;
    Ok(q.integral() / (2.0 * PI))
}
