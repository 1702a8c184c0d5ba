//! The bifractional P function
//!
//! ```text
//! P(α,β;θ,φ|Θ) = (1/π) e^{α²+β²} ∬dγdδ e^{2i(βγ−αδ)} e^{γ²+δ²} ⟨−γ,−δ;θ,φ|Θ|γ,δ;θ,φ⟩
//! ```
//!
//! The weight `e^{γ²+δ²}` grows, so the integral exists only when the
//! matrix element decays faster; the routines certify that numerically
//! and refuse with [`Error::PNotSmooth`] otherwise.

use std::f64::consts::PI;

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{grid, FunctionKind, GridAxes, PhaseSpaceGrid};
use crate::bifrac::BifracAngles;
use crate::error::{Error, Result};
use crate::fock::{FockOperator, MIN_DIM};
use crate::states::bifrac_coherent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PSettings {
    /// Coarse step; the certificate compares it with half of it.
    pub step: f64,
    /// Integration radius. `None` scans for the smallest radius at which
    /// the integrand has decayed below `tail_tol`.
    pub radius: Option<f64>,
    pub max_radius: f64,
    /// Boundary mass relative to the total absolute mass.
    pub tail_tol: f64,
    /// Relative change between the two steps.
    pub change_tol: f64,
}

impl Default for PSettings {
    fn default() -> Self {
        Self {
            step: 0.1,
            radius: None,
            max_radius: 10.0,
            tail_tol: 1e-6,
            change_tol: 1e-3,
        }
    }
}

/// Leading block of `Θ` dropping only exactly-zero rows and columns. The
/// weight amplifies small tail entries, so nothing else may be cut.
fn exact_support_block(theta: &FockOperator) -> Array2<C64> {
    let m = theta.matrix();
    let n = m.nrows();
    let k = (0..n)
        .rev()
        .find(|&k| m.row(k).iter().chain(m.column(k).iter()).any(|v| *v != C64::new(0.0, 0.0)))
        .map_or(1, |k| k + 1)
        .max(MIN_DIM)
        .min(n);
    m.slice(s![..k, ..k]).to_owned()
}

/// `e^{γ²+δ²}⟨−γ,−δ;θ|Θ|γ,δ;θ⟩` on the support block of `Θ`.
fn integrand(block: &Array2<C64>, g: f64, d: f64, angles: BifracAngles) -> Result<C64> {
    let k = block.nrows();
    let (plus, _) = bifrac_coherent(g, d, angles, k)?;
    let (minus, _) = bifrac_coherent(-g, -d, angles, k)?;
    let (p, m) = (plus.amplitudes(), minus.amplitudes());
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..k {
        let mut row = C64::new(0.0, 0.0);
        for c in 0..k {
            row += block[[r, c]] * p[c];
        }
        acc += m[r].conj() * row;
    }
    Ok(acc * (g * g + d * d).exp())
}

fn ring_max(block: &Array2<C64>, radius: f64, angles: BifracAngles) -> Result<f64> {
    let n = 64;
    (0..n)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / n as f64;
            Ok(integrand(block, radius * phi.cos(), radius * phi.sin(), angles)?.norm())
        })
        .try_fold(0.0, |m: f64, v: Result<f64>| Ok(m.max(v?)))
}

struct Disk {
    radius: f64,
    fine_step: f64,
    /// (γ, δ, integrand, also on the coarse lattice)
    samples: Vec<(f64, f64, C64, bool)>,
    tail: f64,
}

fn sample_disk(block: &Array2<C64>, angles: BifracAngles, settings: &PSettings) -> Result<Disk> {
    if !(settings.step > 0.0 && settings.tail_tol > 0.0 && settings.change_tol > 0.0) {
        return Err(Error::Invalid("P-function settings must be positive".into()));
    }
    let scale = integrand(block, 0.0, 0.0, angles)?.norm();
    let mut best = f64::INFINITY;
    let radius = match settings.radius {
        Some(r) => r,
        None => {
            let mut r = 2.0;
            let mut found = None;
            let mut seen = scale;
            while r <= settings.max_radius + 1e-12 {
                let m = ring_max(block, r, angles)?;
                let rel = m / seen.max(m).max(f64::MIN_POSITIVE);
                best = best.min(rel);
                if rel < settings.tail_tol {
                    found = Some(r);
                    break;
                }
                seen = seen.max(m);
                r += 0.5;
            }
            match found {
                Some(r) => r,
                None => {
                    return Err(Error::PNotSmooth {
                        tail: best,
                        change: f64::NAN,
                    })
                }
            }
        }
    };
    let h = settings.step / 2.0;
    let n = (radius / h).ceil() as i64;
    let rows: Vec<Result<Vec<(f64, f64, C64, bool)>>> = (-n..=n)
        .into_par_iter()
        .map(|i| {
            let g = i as f64 * h;
            let mut row = Vec::new();
            for j in -n..=n {
                let d = j as f64 * h;
                if g * g + d * d <= radius * radius {
                    let coarse = i % 2 == 0 && j % 2 == 0;
                    row.push((g, d, integrand(block, g, d, angles)?, coarse));
                }
            }
            Ok(row)
        })
        .collect();
    let mut samples = Vec::new();
    for r in rows {
        samples.extend(r?);
    }
    let mass: f64 = samples.iter().map(|s| s.2.norm()).sum::<f64>() * h * h;
    let boundary = ring_max(block, radius, angles)?;
    let tail = boundary * 2.0 * PI * radius * h / mass.max(f64::MIN_POSITIVE);
    Ok(Disk {
        radius,
        fine_step: h,
        samples,
        tail,
    })
}

impl Disk {
    /// (fine, coarse) estimates of `P(α,β)`.
    fn value(&self, alpha: f64, beta: f64) -> (C64, C64) {
        let mut fine = C64::new(0.0, 0.0);
        let mut coarse = C64::new(0.0, 0.0);
        for &(g, d, f, on_coarse) in &self.samples {
            let v = f * C64::from_polar(1.0, 2.0 * (beta * g - alpha * d));
            fine += v;
            if on_coarse {
                coarse += v;
            }
        }
        let h = self.fine_step;
        let pre = (alpha * alpha + beta * beta).exp() / PI;
        (fine * (pre * h * h), coarse * (pre * 4.0 * h * h))
    }
}

/// Certified value of the P function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValue {
    pub value: C64,
    pub change: f64,
    pub tail: f64,
    pub radius: f64,
}

fn certify(disk: &Disk, change: f64, settings: &PSettings) -> Result<()> {
    if disk.tail < settings.tail_tol && change < settings.change_tol {
        Ok(())
    } else {
        Err(Error::PNotSmooth {
            tail: disk.tail,
            change,
        })
    }
}

pub fn bifrac_p_function(
    theta: &FockOperator,
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
    settings: &PSettings,
) -> Result<PValue> {
    let block = exact_support_block(theta);
    let disk = sample_disk(&block, angles, settings)?;
    let (fine, coarse) = disk.value(alpha, beta);
    let change = (fine - coarse).norm() / fine.norm().max(f64::MIN_POSITIVE);
    certify(&disk, change, settings)?;
    Ok(PValue {
        value: fine,
        change,
        tail: disk.tail,
        radius: disk.radius,
    })
}

/// P on a grid; the step certificate is the largest change relative to
/// the largest value on the grid.
pub fn bifrac_p_grid(
    theta: &FockOperator,
    axes: &GridAxes,
    angles: BifracAngles,
    settings: &PSettings,
) -> Result<PhaseSpaceGrid> {
    let block = exact_support_block(theta);
    let disk = sample_disk(&block, angles, settings)?;
    let (na, nb) = (axes.alpha.len(), axes.beta.len());
    let pairs: Vec<Vec<(C64, C64)>> = (0..na)
        .into_par_iter()
        .map(|i| {
            let a = axes.alpha.point(i);
            (0..nb).map(|j| disk.value(a, axes.beta.point(j))).collect()
        })
        .collect();
    let mut values = Array2::<C64>::zeros((na, nb));
    let mut biggest = 0.0f64;
    let mut diff = 0.0f64;
    for (i, row) in pairs.into_iter().enumerate() {
        for (j, (fine, coarse)) in row.into_iter().enumerate() {
            values[[i, j]] = fine;
            biggest = biggest.max(fine.norm());
            diff = diff.max((fine - coarse).norm());
        }
    }
    let change = diff / biggest.max(f64::MIN_POSITIVE);
    certify(&disk, change, settings)?;
    Ok(grid(theta, axes, FunctionKind::BifracP, Some(angles), values, true))
}
