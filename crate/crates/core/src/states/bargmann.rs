//! Bargmann functions, wave functions and statistics of the states
//! `|α,β;θα,0⟩`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracft::{FracAngle, SpecialAngle};
use crate::quadrature::{integrate_line, QuadratureSettings};

/// Smallest accepted `|1 + 2A|` for the wave function.
pub const DEGENERATE_EPS: f64 = 1e-9;

/// `norm_captured` below which photon statistics are flagged.
pub const NORM_LOSS: f64 = 0.99;

/// Default Taylor truncation of the Bargmann series.
pub const DEFAULT_N_MAX: usize = 30;

/// `B(z) = prefactor·exp(A z² + B z + Γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BargmannParams {
    pub a: C64,
    pub b: C64,
    pub gamma: C64,
    pub prefactor: f64,
}

impl BargmannParams {
    pub fn eval(&self, z: C64) -> C64 {
        self.prefactor * (self.a * z * z + self.b * z + self.gamma).exp()
    }
}

/// Bargmann function of `|α,β;θα,0⟩`:
///
/// ```text
/// A = −1/[2(1 + i cot θα)],  B = β + α/[sin θα (1 + i cot θα)],
/// Γ = −(α² + β²)/2,          prefactor = |cos θα|^{1/2}
/// ```
pub fn bargmann_params(alpha: f64, beta: f64, theta_alpha: f64) -> Result<BargmannParams> {
    let angle = FracAngle::new(theta_alpha);
    let t = angle.theta();
    let (cot, sin, cos) = match angle.special() {
        Some(SpecialAngle::Zero) | Some(SpecialAngle::Pi) => {
            return Err(Error::SpecialAngleNeedsLimit {
                term: "cot θα, 1/sin θα",
                theta_alpha,
                theta_beta: 0.0,
            })
        }
        Some(SpecialAngle::HalfPi) => (0.0, 1.0, 0.0),
        Some(SpecialAngle::MinusHalfPi) => (0.0, -1.0, 0.0),
        None => (1.0 / t.tan(), t.sin(), t.cos()),
    };
    let d = C64::new(1.0, cot);
    Ok(BargmannParams {
        a: -1.0 / (2.0 * d),
        b: beta + alpha / (sin * d),
        gamma: C64::from(-(alpha * alpha + beta * beta) / 2.0),
        prefactor: cos.abs().sqrt(),
    })
}

pub fn bargmann_eval(z: C64, params: &BargmannParams) -> C64 {
    params.eval(z)
}

/// Squeezed coherent state `exp[−¼re^{−iφ}a†² + ¼re^{iφ}a²]·exp(wa† − w*a)|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub w: C64,
    pub r: f64,
    pub phi_sq: f64,
}

impl SqueezeParams {
    pub fn new(w: C64, r: f64, phi_sq: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && phi_sq.is_finite() && w.is_finite()) {
            return Err(Error::Invalid(format!("bad squeeze parameters r={r}, φ={phi_sq}, w={w}")));
        }
        Ok(Self { w, r, phi_sq })
    }

    /// `a = −tanh(r/2)e^{−iφ}`
    pub fn a(&self) -> C64 {
        -(self.r / 2.0).tanh() * C64::from_polar(1.0, -self.phi_sq)
    }

    /// `b = w(1 − |a|²)^{1/2}`
    pub fn b(&self) -> C64 {
        self.w * (1.0 - self.a().norm_sqr()).sqrt()
    }

    /// `c = −a*w²/2 − |w|²/2`
    pub fn c(&self) -> C64 {
        -self.a().conj() * self.w * self.w / 2.0 - self.w.norm_sqr() / 2.0
    }

    pub fn eval(&self, z: C64) -> C64 {
        let a = self.a();
        (1.0 - a.norm_sqr()).powf(0.25) * (a * z * z / 2.0 + self.b() * z + self.c()).exp()
    }

    /// Parameters with `a = 2A` and `b = B`. The constant `c` then follows
    /// from `(w, r, φ)` and is not forced to equal `Γ`.
    pub fn from_bargmann(params: &BargmannParams) -> Result<Self> {
        let a = 2.0 * params.a;
        let m = a.norm();
        if m >= 1.0 {
            return Err(Error::Invalid(format!("|2A| = {m} leaves no finite squeezing")));
        }
        let r = 2.0 * m.atanh();
        let phi_sq = if m == 0.0 { 0.0 } else { -(-a).arg() };
        let w = params.b / (1.0 - m * m).sqrt();
        Self::new(w, r, phi_sq)
    }
}

pub fn squeeze_bargmann(params: &SqueezeParams, z: C64) -> C64 {
    params.eval(z)
}

/// `f(x) = norm·exp(q x² + l x + c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianWave {
    pub norm: C64,
    pub q: C64,
    pub l: C64,
    pub c: C64,
}

impl GaussianWave {
    /// Closed form of the wave function belonging to a Bargmann function:
    ///
    /// ```text
    /// f(x) = |cos θα|^{1/2} π^{−1/4} (1/(1+2A))^{1/2} exp[(κx² + 2^{3/2}Bx + λ)/(2 + 4A)]
    /// κ = 2A − 1,  λ = 2Γ + 4AΓ − B²
    /// ```
    ///
    /// The square root is the principal branch.
    pub fn from_bargmann(params: &BargmannParams) -> Result<Self> {
        let one = 1.0 + 2.0 * params.a;
        if one.norm() <= DEGENERATE_EPS {
            return Err(Error::DegenerateGaussian { value: one.norm() });
        }
        let (a, b, g) = (params.a, params.b, params.gamma);
        let den = 2.0 + 4.0 * a;
        Ok(Self {
            norm: params.prefactor * PI.powf(-0.25) * (1.0 / one).sqrt(),
            q: (2.0 * a - 1.0) / den,
            l: 2f64.powf(1.5) * b / den,
            c: (2.0 * g + 4.0 * a * g - b * b) / den,
        })
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.norm * (self.q * x * x + self.l * x + self.c).exp()
    }

    /// `f'/f`
    pub fn log_derivative(&self, x: f64) -> C64 {
        2.0 * self.q * x + self.l
    }

    /// Centre and standard deviation of `|f|²`.
    pub fn density_shape(&self) -> Result<(f64, f64)> {
        if self.q.re >= 0.0 {
            return Err(Error::DegenerateGaussian { value: self.q.re });
        }
        let center = -self.l.re / (2.0 * self.q.re);
        Ok((center, (-1.0 / (4.0 * self.q.re)).sqrt()))
    }
}

/// Closed-form wave function at `x`.
pub fn wavefunction(x: f64, params: &BargmannParams) -> Result<C64> {
    Ok(GaussianWave::from_bargmann(params)?.eval(x))
}

/// `π^{−3/4} e^{−x²/2} ∫dp B((x+ip)√2) e^{−p²}` by certified quadrature.
pub fn wavefunction_integral(x: f64, params: &BargmannParams, settings: &QuadratureSettings) -> Result<C64> {
    // integrand is exp(u p² + v p + const) with
    let u = -2.0 * params.a - 1.0;
    let v = C64::i() * (4.0 * params.a * x + std::f64::consts::SQRT_2 * params.b);
    if u.re >= 0.0 {
        return Err(Error::DegenerateGaussian { value: u.re });
    }
    let center = -v.re / (2.0 * u.re);
    let width = (-1.0 / (2.0 * u.re)).sqrt();
    let s = QuadratureSettings {
        step: settings.step.min(width / 2.0),
        ..*settings
    };
    let z0 = C64::new(x, 0.0) * std::f64::consts::SQRT_2;
    let r = integrate_line(
        |p| {
            let z = z0 + C64::new(0.0, p * std::f64::consts::SQRT_2);
            [params.eval(z) * (-p * p).exp()]
        },
        center,
        12.0 * width + 1.0,
        &s,
        "wave function integral",
    )?;
    Ok(PI.powf(-0.75) * (-x * x / 2.0).exp() * r.value[0])
}

/// First and second moments of a pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_x2: f64,
    pub mean_p2: f64,
    pub sxx: f64,
    pub spp: f64,
    pub sxp: f64,
}

impl Moments {
    /// `σxx σpp − σxp² − 1/4`, zero for Gaussian pure states.
    pub fn rs_residual(&self) -> f64 {
        self.sxx * self.spp - self.sxp * self.sxp - 0.25
    }
}

/// Moments from the closed-form wave function. Position moments are
/// integrals of `xⁿ|f|²`; momentum moments use the analytic derivatives
/// `f' = f·E'`, `f'' = f·(E'' + E'²)`.
pub fn moments_from_wavefunction(params: &BargmannParams, settings: &QuadratureSettings) -> Result<Moments> {
    let wave = GaussianWave::from_bargmann(params)?;
    let (center, sd) = wave.density_shape()?;
    let s = QuadratureSettings {
        step: settings.step.min(sd / 3.0),
        ..*settings
    };
    let i = C64::i();
    let e2 = 2.0 * wave.q;
    let r = integrate_line(
        |x| {
            let rho = C64::from(wave.eval(x).norm_sqr());
            let e1 = wave.log_derivative(x);
            [
                rho,
                rho * x,
                rho * x * x,
                rho * (-i * e1),
                rho * (-(e2 + e1 * e1)),
                rho * x * (-i * e1),
            ]
        },
        center,
        11.0 * sd + 1.0,
        &s,
        "wave function moments",
    )?;
    let [n, x1, x2, p1, p2, xp] = r.value;
    let mean_x = x1.re;
    let mean_p = p1.re;
    let sym = (-0.5 * i + xp).re;
    Ok(Moments {
        norm: n.re,
        mean_x,
        mean_p,
        mean_x2: x2.re,
        mean_p2: p2.re,
        sxx: x2.re - mean_x * mean_x,
        spp: p2.re - mean_p * mean_p,
        sxp: sym - mean_x * mean_p,
    })
}

/// Photon-number statistics from the Taylor series of the Bargmann function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonStats {
    pub a_n: Vec<C64>,
    pub mean_n: f64,
    pub mean_n2: f64,
    /// `(⟨n²⟩ − ⟨n⟩)/⟨n⟩²`; NaN when `⟨n⟩ = 0`.
    pub g2: f64,
    pub norm_captured: f64,
}

impl PhotonStats {
    pub fn from_amplitudes(a_n: Vec<C64>) -> Self {
        let mut norm = 0.0;
        let mut n1 = 0.0;
        let mut n2 = 0.0;
        for (n, a) in a_n.iter().enumerate() {
            let p = a.norm_sqr();
            let nf = n as f64;
            norm += p;
            n1 += nf * p;
            n2 += nf * nf * p;
        }
        let g2 = if n1 > 0.0 { (n2 - n1) / (n1 * n1) } else { f64::NAN };
        Self {
            a_n,
            mean_n: n1,
            mean_n2: n2,
            g2,
            norm_captured: norm,
        }
    }

    /// True when the truncated series misses more than 1% of the norm.
    pub fn norm_loss(&self) -> bool {
        self.norm_captured < NORM_LOSS
    }
}

/// `aₙ` for `n ≤ n_max`, from `B(z) = Σ aₙ zⁿ/√n!`. The Taylor
/// coefficients of `exp(Az² + Bz)` obey `c_{n+1} = (B cₙ + 2A c_{n−1})/(n+1)`;
/// the recurrence is run directly on `dₙ = cₙ√n!`.
pub fn photon_stats(params: &BargmannParams, n_max: usize) -> Result<PhotonStats> {
    if n_max < 10 {
        return Err(Error::Invalid(format!("n_max = {n_max} is below 10")));
    }
    let scale = params.prefactor * params.gamma.exp();
    let mut d = vec![C64::new(0.0, 0.0); n_max + 1];
    d[0] = C64::from(1.0);
    d[1] = params.b;
    for n in 1..n_max {
        let nf = n as f64;
        d[n + 1] = (params.b * d[n] + 2.0 * params.a * nf.sqrt() * d[n - 1]) / (nf + 1.0).sqrt();
    }
    let a_n = d.into_iter().map(|v| v * scale).collect();
    Ok(PhotonStats::from_amplitudes(a_n))
}

/// One row of the θα sweep at fixed `(α, β)`, `θβ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_alpha: f64,
    pub sigma_pp: f64,
    pub mean_n: f64,
    pub g2: f64,
    pub norm_captured: f64,
    pub rs_residual: f64,
    pub moments: Moments,
}

pub const SWEEP_HEADER: &str = "theta_alpha,sigma_pp,mean_n,g2,norm_captured";

/// Moments and photon statistics along `thetas`, in input order.
pub fn theta_alpha_sweep(
    alpha: f64,
    beta: f64,
    thetas: &[f64],
    n_max: usize,
    settings: &QuadratureSettings,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    thetas
        .par_iter()
        .map(|&t| {
            let params = bargmann_params(alpha, beta, t)?;
            let m = moments_from_wavefunction(&params, settings)?;
            let stats = photon_stats(&params, n_max)?;
            Ok(SweepRow {
                theta_alpha: t,
                sigma_pp: m.spp,
                mean_n: stats.mean_n,
                g2: stats.g2,
                norm_captured: stats.norm_captured,
                rs_residual: m.rs_residual(),
                moments: m,
            })
        })
        .collect()
}

/// CSV with [`SWEEP_HEADER`], 5 significant digits; `with_check` appends
/// an `rs_residual` column.
pub fn sweep_csv(rows: &[SweepRow], with_check: bool) -> String {
    use crate::format::fmt5;
    let mut out = String::from(SWEEP_HEADER);
    if with_check {
        out.push_str(",rs_residual");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}",
            fmt5(r.theta_alpha),
            fmt5(r.sigma_pp),
            fmt5(r.mean_n),
            fmt5(r.g2),
            fmt5(r.norm_captured)
        ));
        if with_check {
            out.push_str(&format!(",{:.3e}", r.rs_residual));
        }
        out.push('\n');
    }
    out
}
