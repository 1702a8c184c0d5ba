//! The defining double integral of `U`, evaluated by brute-force quadrature
//! over closed-form displacement matrix elements. Slow; used to validate
//! the closed form.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::BifracAngles;
use crate::error::{Error, Result};
use crate::fock::hermite::displacement_elements_into;
use crate::fock::{FockOperator, MIN_DIM};
use crate::fracft::{kernel_value, FracAngle};
use crate::quadrature::{QuadratureSettings, UniformGrid};

/// Oracle output with its convergence certificate.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub operator: FockOperator,
    /// Max-abs change of the last refinement round.
    pub change: f64,
    /// Largest integrand magnitude on the boundary of the last round.
    pub tail: f64,
    pub half_width: f64,
    pub step: f64,
}

/// Default settings for an oracle of dimension `dim`.
///
/// The kernels have constant modulus, so the integrand decays only through
/// `⟨m|D(α',β')|n⟩`, which is below 1e-7 beyond `|λ'| ≈ 3 + 2√dim`; the
/// half-width is the larger of that and `max(6, 3 + 2·max(|α|,|β|))`. The
/// step resolves the fastest chirp on the box to about 2 rad per step
/// and is then halved once (and at most once more) as the certificate.
pub fn oracle_settings(alpha: f64, beta: f64, angles: BifracAngles, dim: usize) -> QuadratureSettings {
    let half = 6f64
        .max(3.0 + 2.0 * alpha.abs().max(beta.abs()))
        .max(3.0 + 2.0 * (dim as f64).sqrt());
    let (ta, tb) = (angles.theta_alpha(), angles.theta_beta());
    let freq = half * (1.0 / ta.tan()).abs().max((1.0 / tb.tan()).abs()).max(1.0)
        + (alpha / ta.sin()).abs()
        + (beta / tb.sin()).abs()
        + half;
    QuadratureSettings {
        half_width: Some(half),
        step: (2.0 / freq).min(0.08),
        max_doublings: 2,
        tol: 1e-6,
        growth: 1.1,
    }
}

/// `|cos(θα−θβ)|^{1/2} ∬dα'dβ' Δ(β,α';θβ) Δ(α,−β';θα) D(α',β')` on a
/// tensor trapezoid grid, refined (half step, wider box) until two rounds
/// agree to `settings.tol` and the boundary integrand is below it.
pub fn bifrac_operator_integral(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
    dim: usize,
    settings: &QuadratureSettings,
) -> Result<OracleResult> {
    settings.validate()?;
    if dim < MIN_DIM {
        return Err(Error::DimTooSmall { dim });
    }
    let ta = FracAngle::new(angles.theta_alpha());
    let tb = FracAngle::new(angles.theta_beta());
    for t in [ta, tb] {
        if !t.is_regular() {
            return Err(Error::SpecialAngle { theta: t.theta() });
        }
    }
    let pre = angles.cos_diff().abs().sqrt();
    let mut half = settings
        .half_width
        .unwrap_or_else(|| 6f64.max(3.0 + 2.0 * (dim as f64).sqrt()));
    let mut step = settings.step;

    let round = |half: f64, step: f64| -> Result<(Array2<C64>, f64)> {
        let grid = UniformGrid::symmetric(half, step)?;
        let pts: Vec<f64> = grid.points().collect();
        let wa: Vec<C64> = pts
            .iter()
            .enumerate()
            .map(|(k, &a)| Ok(kernel_value(beta, a, tb)? * grid.trapezoid_weight(k)))
            .collect::<Result<_>>()?;
        let wb: Vec<C64> = pts
            .iter()
            .enumerate()
            .map(|(k, &b)| Ok(kernel_value(alpha, -b, ta)? * grid.trapezoid_weight(k)))
            .collect::<Result<_>>()?;
        let last = pts.len() - 1;
        let rows: Vec<(Array2<C64>, f64)> = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Array2::<C64>::zeros((dim, dim));
                let mut d = Array2::<C64>::zeros((dim, dim));
                let mut tail = 0.0f64;
                for (j, &b) in pts.iter().enumerate() {
                    displacement_elements_into(pts[i], b, &mut d);
                    if i == 0 || i == last || j == 0 || j == last {
                        let big = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
                        tail = tail.max(big * (wa[i] * wb[j]).norm() / (step * step));
                    }
                    acc.scaled_add(wb[j], &d);
                }
                (acc.mapv(|v| v * wa[i]), tail)
            })
            .collect();
        let mut total = Array2::<C64>::zeros((dim, dim));
        let mut tail = 0.0f64;
        for (r, t) in rows {
            total += &r;
            tail = tail.max(t);
        }
        Ok((total.mapv(|v| v * pre), tail * pre))
    };

    let (mut prev, _) = round(half, step)?;
    let mut change = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for _ in 0..settings.max_doublings.max(1) {
        half *= settings.growth;
        step /= 2.0;
        let (next, t) = round(half, step)?;
        change = (&next - &prev).iter().map(|v| v.norm()).fold(0.0, f64::max);
        tail = t;
        prev = next;
        if change < settings.tol && tail < settings.tol {
            return Ok(OracleResult {
                operator: FockOperator::new(prev)?,
                change,
                tail,
                half_width: half,
                step,
            });
        }
    }
    Err(Error::QuadratureDivergence {
        what: "bifractional operator integral",
        change,
        tail,
    })
}
