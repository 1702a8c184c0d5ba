//! Single-mode Gaussian unitaries: Heisenberg action, exact Fock matrix
//! elements, and recovery of the action from a truncated matrix.

use std::f64::consts::{PI, SQRT_2};

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{bto_factors, BifracAngles, BtoFactors, SpecialCase};
use crate::error::{Error, Result};
use crate::fock::{self, FockOperator, TruncationReport};

/// Largest accepted deviation of `det S` from 1.
pub const DET_TOL: f64 = 1e-8;

/// Largest accepted residual in [`gaussian_fingerprint`].
pub const FIT_TOL: f64 = 1e-6;

/// `U†(x, p)ᵀU = S (x, p)ᵀ + d`, together with the phase of `⟨0|U|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianUnitary {
    pub s: [[f64; 2]; 2],
    pub d: [f64; 2],
    /// Unit-modulus phase of the vacuum amplitude (re, im).
    pub phase: [f64; 2],
}

impl GaussianUnitary {
    pub fn new(s: [[f64; 2]; 2], d: [f64; 2], phase: C64) -> Result<Self> {
        let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Invalid(format!("det S = {det} is not 1")));
        }
        if phase.norm() == 0.0 || !phase.is_finite() {
            return Err(Error::Invalid("phase must be a nonzero finite number".into()));
        }
        let phase = phase / phase.norm();
        Ok(Self {
            s,
            d,
            phase: [phase.re, phase.im],
        })
    }

    /// `D(α,β)`: `S = 1`, `d = √2(α, β)`.
    pub fn displacement(alpha: f64, beta: f64) -> Self {
        Self {
            s: [[1.0, 0.0], [0.0, 1.0]],
            d: [SQRT_2 * alpha, SQRT_2 * beta],
            phase: [1.0, 0.0],
        }
    }

    /// `Π(α,β)`: `S = −1`, `d = √2(α, β)`.
    pub fn parity(alpha: f64, beta: f64) -> Self {
        Self {
            s: [[-1.0, 0.0], [0.0, -1.0]],
            d: [SQRT_2 * alpha, SQRT_2 * beta],
            phase: [1.0, 0.0],
        }
    }

    pub fn phase(&self) -> C64 {
        C64::new(self.phase[0], self.phase[1])
    }

    pub fn det(&self) -> f64 {
        self.s[0][0] * self.s[1][1] - self.s[0][1] * self.s[1][0]
    }

    /// Coefficients of the generating function
    /// `⟨m|U|n⟩ ↔ C exp(½R₀₀z² + R₀₁zw + ½R₁₁w² + μ₀z + μ₁w)`.
    fn kernel(&self) -> Kernel {
        let det = self.det();
        let [[a, b], [c, d]] = self.s;
        // U(x,p)ᵀU† = S⁻¹(x,p)ᵀ − S⁻¹d
        let si = [[d / det, -b / det], [-c / det, a / det]];
        let dp = [
            -(si[0][0] * self.d[0] + si[0][1] * self.d[1]),
            -(si[1][0] * self.d[0] + si[1][1] * self.d[1]),
        ];
        let ax = C64::new(si[0][0], si[1][0]);
        let ap = C64::new(si[0][1], si[1][1]);
        let mu = (ax - C64::i() * ap) / 2.0;
        let nu = (ax + C64::i() * ap) / 2.0;
        let gamma = C64::new(dp[0], dp[1]) / SQRT_2;
        let mu0 = -gamma / mu;
        Kernel {
            r00: -nu / mu,
            r01: 1.0 / mu,
            r11: nu.conj() / mu,
            mu0,
            mu1: nu.conj() * mu0 + gamma.conj(),
        }
    }

    /// `|⟨0|U|0⟩|` from normalization of the vacuum column.
    pub fn vacuum_modulus(&self) -> f64 {
        let k = self.kernel();
        let q = 1.0 - k.r00.norm_sqr();
        let expo = (k.mu0.norm_sqr() + (k.r00.conj() * k.mu0 * k.mu0).re) / q;
        (q.sqrt() * (-expo).exp()).sqrt()
    }

    /// Exact matrix elements `⟨m|U|n⟩`, `m, n < dim`, with
    /// `⟨0|U|0⟩ = |⟨0|U|0⟩|·phase`.
    pub fn to_fock(&self, dim: usize) -> Result<(FockOperator, TruncationReport)> {
        let g00 = self.phase() * self.vacuum_modulus();
        let (m, leak) = self.fock_elements(g00, dim)?;
        let report =
            TruncationReport::for_operator(&m.view(), fock::default_probe(dim), Some(&leak));
        Ok((FockOperator::new(m)?, report))
    }

    /// `U|0⟩` truncated to `dim`, and the probability lost beyond `dim`.
    pub fn vacuum_column(&self, g00: C64, dim: usize) -> Result<(Array1<C64>, f64)> {
        if dim < fock::MIN_DIM {
            return Err(Error::DimTooSmall { dim });
        }
        let col = vacuum_recurrence(&self.kernel(), g00, dim);
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { norm: f64::INFINITY });
        }
        let leak = (1.0 - col.iter().map(|v| v.norm_sqr()).sum::<f64>()).max(0.0);
        Ok((col, leak))
    }

    /// Matrix elements from a given vacuum amplitude, plus the probability
    /// each column loses beyond `dim`.
    ///
    /// Uses the two-index recurrence of the generating function; all of its
    /// coefficients are bounded (`|R₀₀| < 1`) so it is stable for any
    /// squeezing.
    pub fn fock_elements(&self, g00: C64, dim: usize) -> Result<(Array2<C64>, Vec<f64>)> {
        if dim < fock::MIN_DIM {
            return Err(Error::DimTooSmall { dim });
        }
        let k = self.kernel();
        let sq: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
        let mut g = Array2::<C64>::zeros((dim, dim));
        g.column_mut(0).assign(&vacuum_recurrence(&k, g00, dim));
        for n in 0..dim - 1 {
            for m in 0..dim {
                let mut acc = k.mu1 * g[[m, n]];
                if n > 0 {
                    acc += k.r11 * sq[n] * g[[m, n - 1]];
                }
                if m > 0 {
                    acc += k.r01 * sq[m] * g[[m - 1, n]];
                }
                g[[m, n + 1]] = acc / sq[n + 1];
            }
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { norm: f64::INFINITY });
        }
        let leak = (0..dim)
            .map(|n| (1.0 - g.column(n).iter().map(|v| v.norm_sqr()).sum::<f64>()).max(0.0))
            .collect();
        Ok((g, leak))
    }
}

/// `⟨m|U|0⟩` for `m < dim` from the one-index recurrence.
fn vacuum_recurrence(k: &Kernel, g00: C64, dim: usize) -> Array1<C64> {
    let mut col = Array1::<C64>::zeros(dim);
    col[0] = g00;
    for m in 0..dim - 1 {
        let mut acc = k.mu0 * col[m];
        if m > 0 {
            acc += k.r00 * (m as f64).sqrt() * col[m - 1];
        }
        col[m + 1] = acc / ((m + 1) as f64).sqrt();
    }
    col
}

struct Kernel {
    r00: C64,
    r01: C64,
    r11: C64,
    mu0: C64,
    mu1: C64,
}

/// Heisenberg action of the two factors of the regrouped closed form.
fn heisenberg(f: &BtoFactors, alpha: f64) -> ([[f64; 2]; 2], [f64; 2]) {
    let (t, tau) = (f.t, f.tau);
    // exp[i(τK² − 2τ_bK)]: K → K, x → x + 2τK − 2τ_b, p → p + 2τtK − 2τ_b t
    let s1 = [
        [1.0 + 2.0 * tau * t, -2.0 * tau],
        [2.0 * tau * t * t, 1.0 - 2.0 * tau * t],
    ];
    let shift = 2.0 * tau * f.s - 2.0 * f.tau_b;
    let d1 = [-shift, -shift * t];
    // exp[i(t x² − √2αx/c)]: p → p + 2t x − √2α/c
    let s2 = [[1.0, 0.0], [2.0 * t, 1.0]];
    let d2 = [0.0, -SQRT_2 * alpha / f.c];
    let s = [
        [
            s1[0][0] * s2[0][0] + s1[0][1] * s2[1][0],
            s1[0][0] * s2[0][1] + s1[0][1] * s2[1][1],
        ],
        [
            s1[1][0] * s2[0][0] + s1[1][1] * s2[1][0],
            s1[1][0] * s2[0][1] + s1[1][1] * s2[1][1],
        ],
    ];
    let d = [
        s1[0][0] * d2[0] + s1[0][1] * d2[1] + d1[0],
        s1[1][0] * d2[0] + s1[1][1] * d2[1] + d1[1],
    ];
    (s, d)
}

/// Gaussian wave packet `exp(a x² + b x + c)`.
#[derive(Debug, Clone, Copy)]
struct Wave {
    a: C64,
    b: C64,
    c: C64,
}

impl Wave {
    /// Multiply by `exp(i(u k² + v k + w))` in momentum space.
    fn momentum_multiplier(self, u: f64, v: f64, w: f64) -> Wave {
        let i = C64::i();
        let ak = 1.0 / (4.0 * self.a) + i * u;
        let bk = i * self.b / (2.0 * self.a) + i * v;
        let ck = self.c - self.b * self.b / (4.0 * self.a) - 0.5 * (-2.0 * self.a).ln() + i * w;
        Wave {
            a: 1.0 / (4.0 * ak),
            b: -i * bk / (2.0 * ak),
            c: ck - bk * bk / (4.0 * ak) - 0.5 * (-2.0 * ak).ln(),
        }
    }
}

/// `ln⟨0|U|0⟩` by pushing the vacuum wave function through the factors.
fn log_vacuum_amplitude(f: &BtoFactors, alpha: f64) -> C64 {
    let i = C64::i();
    let t = f.t;
    // the right factor, with the −t x² of K's conjugation folded in
    let wave = Wave {
        a: C64::new(-0.5, t) - i * t / 2.0,
        b: -i * SQRT_2 * alpha / f.c,
        c: C64::from(-0.25 * PI.ln()),
    };
    // K = e^{−itx²/2}(p + s)e^{itx²/2}
    let wave = wave.momentum_multiplier(
        f.tau,
        2.0 * f.tau * f.s - 2.0 * f.tau_b,
        f.tau * f.s * f.s - 2.0 * f.tau_b * f.s,
    );
    let (a, b, c) = (wave.a + i * t / 2.0, wave.b, wave.c + i * f.phase);
    // overlap with the vacuum: π^{−1/4}∫exp(−x²/2)·exp(ax² + bx + c)dx
    c + 0.25 * PI.ln() - 0.5 * (0.5 - a).ln() + b * b / (2.0 * (1.0 - 2.0 * a))
}

/// Gaussian data of `U(α,β;θα,θβ)` and its exact vacuum amplitude.
pub fn bifrac_gaussian(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
) -> Result<(GaussianUnitary, C64)> {
    if let Some(case) = angles.special_case() {
        let g = match case {
            SpecialCase::ZeroZero => GaussianUnitary::displacement(beta, -alpha),
            SpecialCase::HalfHalf => GaussianUnitary::parity(alpha, beta),
            SpecialCase::PiPi => GaussianUnitary::displacement(-beta, alpha),
            SpecialCase::MinusHalfMinusHalf => GaussianUnitary::parity(-alpha, -beta),
        };
        let g00 = g.phase() * g.vacuum_modulus();
        return Ok((g, g00));
    }
    let f = bto_factors(alpha, beta, angles)?;
    let (s, d) = heisenberg(&f, alpha);
    let g00 = log_vacuum_amplitude(&f, alpha).exp();
    let g = GaussianUnitary::new(s, d, g00)?;
    Ok((g, g00))
}

/// `⟨0|U|0⟩` of the defining double-kernel integral:
/// `|cos(θα−θβ)|^{1/2} e^{−(α²+β²)/2}`, positive at every angle pair.
///
/// `⟨0|D(α',β')|0⟩ = e^{−(α'²+β'²)/2}` separates the integral into two
/// kernel transforms of the vacuum, each of which returns the vacuum with
/// eigenvalue 1.
pub fn defining_vacuum_amplitude(alpha: f64, beta: f64, angles: BifracAngles) -> f64 {
    angles.cos_diff().abs().sqrt() * (-(alpha * alpha + beta * beta) / 2.0).exp()
}

/// [`bifrac_gaussian`] rephased so the vacuum amplitude is that of the
/// defining integral. Differs from the product form by a fourth root of
/// unity outside `θα, θβ ∈ (−π/2, π/2)` with `cos(θα−θβ) > 0`.
pub fn bifrac_gaussian_defining(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
) -> Result<(GaussianUnitary, C64)> {
    let (g, _) = bifrac_gaussian(alpha, beta, angles)?;
    let g = GaussianUnitary::new(g.s, g.d, C64::from(1.0))?;
    Ok((g, C64::from(defining_vacuum_amplitude(alpha, beta, angles))))
}

/// Recover `S`, `d` and the vacuum phase of a truncated unitary by fitting
/// `U†xU` and `U†pU` as `c₁x + c₂p + c₃` over the block of columns that
/// the truncation report trusts. Returns the action and the fit residual.
pub fn gaussian_fingerprint(u: &FockOperator) -> Result<(GaussianUnitary, f64)> {
    let dim = u.dim();
    let report = u.truncation_report();
    let k = report.trusted_dim.min(fock::interior_dim(dim));
    if k < 3 {
        return Err(Error::Invalid(format!(
            "only {k} trusted columns; cannot fit a Gaussian action"
        )));
    }
    let (x, p) = fock::quadrature_ops(dim)?;
    let cols = u.matrix().slice(s![.., ..k]).to_owned();
    let cols_h = cols.t().mapv(|v| v.conj());
    let xb = x.matrix().slice(s![..k, ..k]).to_owned();
    let pb = p.matrix().slice(s![..k, ..k]).to_owned();

    let mut s = [[0.0; 2]; 2];
    let mut d = [0.0; 2];
    let mut residual = 0.0f64;
    for (row, q) in [x.matrix(), p.matrix()].into_iter().enumerate() {
        let conj = cols_h.dot(&q.dot(&cols));
        // x, p and 1 are mutually orthogonal under the Frobenius product on
        // the block, so the least-squares fit is three projections.
        let proj = |basis: &Array2<C64>| -> f64 {
            let num: C64 = basis.iter().zip(conj.iter()).map(|(b, m)| b.conj() * m).sum();
            let den: f64 = basis.iter().map(|b| b.norm_sqr()).sum();
            num.re / den
        };
        let cx = proj(&xb);
        let cp = proj(&pb);
        let c1 = conj.diag().iter().map(|v| v.re).sum::<f64>() / k as f64;
        let fit = &xb * C64::from(cx) + &pb * C64::from(cp) + Array2::<C64>::eye(k) * C64::from(c1);
        residual = residual.max(
            fit.iter()
                .zip(conj.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        );
        s[row] = [cx, cp];
        d[row] = c1;
    }
    if residual >= FIT_TOL {
        return Err(Error::NotGaussian { residual });
    }
    let g00 = u.get(0, 0);
    let phase = if g00.norm() > 0.0 { g00 / g00.norm() } else { C64::new(1.0, 0.0) };
    Ok((
        GaussianUnitary {
            s,
            d,
            phase: [phase.re, phase.im],
        },
        residual,
    ))
}
