//! Bifractional coherent states `|α,β;θα,θβ⟩ = U(α,β;θα,θβ)|0⟩` and the
//! quantities built on them.

pub mod bargmann;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bifrac::{bifrac_gaussian_defining, BifracAngles};
use crate::error::{Error, Result};
use crate::fock::{self, FockState, TruncationReport};
use crate::fracft::{kernel_value, FracAngle, SpecialAngle};
use crate::quadrature::UniformGrid;

pub use bargmann::{
    bargmann_eval, bargmann_params, moments_from_wavefunction, photon_stats, squeeze_bargmann,
    sweep_csv, theta_alpha_sweep, wavefunction, wavefunction_integral, BargmannParams,
    GaussianWave, Moments, PhotonStats, SqueezeParams, SweepRow, DEFAULT_N_MAX, SWEEP_HEADER,
};

/// `U(α,β;θα,θβ)|0⟩` truncated to `dim`.
///
/// The column comes from the exact Gaussian elements at every angle pair,
/// special pairs included, with the phase of the defining integral; the
/// report counts the mass lost past `dim`.
pub fn bifrac_coherent(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
    dim: usize,
) -> Result<(FockState, TruncationReport)> {
    let (g, g00) = bifrac_gaussian_defining(alpha, beta, angles)?;
    let (col, leak) = g.vacuum_column(g00, dim)?;
    let report = TruncationReport::for_state(&col, leak);
    Ok((FockState::checked_raw(col)?, report))
}

/// `g(α,β;θα,θβ) = (1/2π)⟨α,β;θα,θβ|g⟩`.
pub fn analysis_coefficients(g: &FockState, alpha: f64, beta: f64, angles: BifracAngles) -> Result<C64> {
    let (psi, _) = bifrac_coherent(alpha, beta, angles, g.dim())?;
    Ok(psi.inner(g)? / (2.0 * PI))
}

/// The measure `μ` with `μ∫dαdβ |α,β;θ⟩⟨α,β;θ| = 1`, namely
/// `1/(π|cos(θα−θβ)|)`. The map `(α,β) ↦` displacement of
/// `U(α,β;θ)U(0,0;θ)†` has Jacobian `1/|cos(θα−θβ)|`, and Glauber
/// coherent states resolve the identity with `1/π`.
pub fn resolution_measure(angles: BifracAngles) -> f64 {
    1.0 / (PI * angles.cos_diff().abs())
}

/// `∬dαdβ |α,β;θ⟩·g(α,β;θ)` on the square grid `axis × axis` (trapezoid),
/// with the coefficients of [`analysis_coefficients`]. Returns an
/// unnormalized vector.
pub fn reconstruct_state(g: &FockState, angles: BifracAngles, axis: &UniformGrid) -> Result<FockState> {
    let dim = g.dim();
    let rows: Vec<Result<ndarray::Array1<C64>>> = (0..axis.len())
        .into_par_iter()
        .map(|i| {
            let a = axis.point(i);
            let mut acc = ndarray::Array1::<C64>::zeros(dim);
            for j in 0..axis.len() {
                let (psi, _) = bifrac_coherent(a, axis.point(j), angles, dim)?;
                let coef = psi.inner(g)? / (2.0 * PI);
                let w = axis.trapezoid_weight(i) * axis.trapezoid_weight(j);
                acc.scaled_add(coef * w, psi.amplitudes());
            }
            Ok(acc)
        })
        .collect();
    let mut total = ndarray::Array1::<C64>::zeros(dim);
    for r in rows {
        total += &r?;
    }
    FockState::checked_raw(total)
}

/// Quadrature nodes and weights `Δ(x, x';φ)dx'` for one axis. At `φ = 0`
/// and `φ = π` the kernel is `δ(x ∓ x')` and a single node is used.
fn axis_weights(x: f64, phi: f64, axis: &UniformGrid) -> Result<Vec<(f64, C64)>> {
    let angle = FracAngle::new(phi);
    match angle.special() {
        Some(SpecialAngle::Zero) => Ok(vec![(x, C64::from(1.0))]),
        Some(SpecialAngle::Pi) => Ok(vec![(-x, C64::from(1.0))]),
        _ => (0..axis.len())
            .map(|k| {
                let xp = axis.point(k);
                Ok((xp, kernel_value(x, xp, angle)? * axis.trapezoid_weight(k)))
            })
            .collect(),
    }
}

/// `|α,β;θα+φα,θβ+φβ⟩` built from the family at `(θα, θβ)`:
///
/// ```text
/// |cos(θα+φα−θβ−φβ)|^{1/2}/|cos(θα−θβ)|^{1/2} ∬dα'dβ' Δ(β,β';φβ)Δ(α,α';φα)|α',β';θα,θβ⟩
/// ```
///
/// by trapezoid quadrature on `axis × axis`. The integrand does not decay
/// in norm; convergence comes from the oscillating kernels, so the grid
/// must resolve them and cover the support of the target's coefficients.
pub fn family_transform(
    alpha: f64,
    beta: f64,
    phi_alpha: f64,
    phi_beta: f64,
    angles: BifracAngles,
    dim: usize,
    axis: &UniformGrid,
) -> Result<FockState> {
    let target = angles.shifted(phi_alpha, phi_beta)?;
    let ratio = (target.cos_diff().abs() / angles.cos_diff().abs()).sqrt();
    let wa = axis_weights(alpha, phi_alpha, axis)?;
    let wb = axis_weights(beta, phi_beta, axis)?;
    let rows: Vec<Result<ndarray::Array1<C64>>> = wa
        .par_iter()
        .map(|&(ap, wai)| {
            let mut acc = ndarray::Array1::<C64>::zeros(dim);
            for &(bp, wbj) in &wb {
                let (psi, _) = bifrac_coherent(ap, bp, angles, dim)?;
                acc.scaled_add(wai * wbj, psi.amplitudes());
            }
            Ok(acc)
        })
        .collect();
    let mut total = ndarray::Array1::<C64>::zeros(dim);
    for r in rows {
        total += &r?;
    }
    FockState::checked_raw(total.mapv(|v| v * ratio))
}

/// Moments `⟨x⟩, ⟨p⟩, σ` of a Fock-basis state from the truncated
/// quadrature matrices; valid when the state has no weight at the edge.
pub fn moments_from_state(state: &FockState) -> Result<Moments> {
    let (x, p) = fock::quadrature_ops(state.dim())?;
    let xs = x.apply(state)?;
    let ps = p.apply(state)?;
    let norm = state.inner(state)?.re;
    let mean_x = state.inner(&xs)?.re;
    let mean_p = state.inner(&ps)?.re;
    let mean_x2 = xs.inner(&xs)?.re;
    let mean_p2 = ps.inner(&ps)?.re;
    // ⟨(xp+px)/2⟩ = Re⟨xψ|pψ⟩
    let sym = xs.inner(&ps)?.re;
    Ok(Moments {
        norm,
        mean_x,
        mean_p,
        mean_x2,
        mean_p2,
        sxx: mean_x2 - mean_x * mean_x,
        spp: mean_p2 - mean_p * mean_p,
        sxp: sym - mean_x * mean_p,
    })
}

/// Photon statistics of a Fock-basis state over its first `n_max + 1`
/// amplitudes.
pub fn photon_stats_from_state(state: &FockState, n_max: usize) -> Result<PhotonStats> {
    if n_max + 1 > state.dim() {
        return Err(Error::Invalid(format!("n_max {n_max} exceeds dimension {}", state.dim())));
    }
    Ok(PhotonStats::from_amplitudes(
        state.amplitudes().iter().take(n_max + 1).copied().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::displacement_exact;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_zero_is_glauber() {
        let angles = BifracAngles::new(0.0, 0.0).unwrap();
        let (psi, report) = bifrac_coherent(0.8, -0.3, angles, 40).unwrap();
        assert!(report.trusted);
        let expect = displacement_exact(-0.3, -0.8, 40).unwrap();
        for n in 0..40 {
            assert!((psi.amplitudes()[n] - expect.get(n, 0)).norm() < 1e-13);
        }
    }

    #[test]
    fn half_half_is_glauber() {
        let angles = BifracAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let (psi, _) = bifrac_coherent(0.8, -0.3, angles, 40).unwrap();
        let expect = displacement_exact(0.8, -0.3, 40).unwrap();
        for n in 0..40 {
            assert!((psi.amplitudes()[n] - expect.get(n, 0)).norm() < 1e-13);
        }
    }

    #[test]
    fn vacuum_coefficient() {
        let angles = BifracAngles::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        let g = FockState::vacuum(16).unwrap();
        let c = analysis_coefficients(&g, 0.0, 0.0, angles).unwrap();
        assert!((c - 1.0 / (2.0 * PI)).norm() < 1e-15);
    }

    #[test]
    fn zero_shift_is_identity() {
        let angles = BifracAngles::new(0.4, 0.1).unwrap();
        let axis = UniformGrid::linspace(-1.0, 1.0, 3).unwrap();
        let out = family_transform(0.3, 0.2, 0.0, 0.0, angles, 24, &axis).unwrap();
        let (direct, _) = bifrac_coherent(0.3, 0.2, angles, 24).unwrap();
        let diff = out.add_scaled(C64::from(-1.0), &direct).unwrap().norm();
        assert!(diff < 1e-14, "diff {diff}");
    }
}
