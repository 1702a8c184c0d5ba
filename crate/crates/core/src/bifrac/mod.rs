//! The bifractional displacement operator
//!
//! ```text
//! U(α,β;θα,θβ) = |cos(θα−θβ)|^{1/2} ∬dα'dβ' Δ(β,α';θβ) Δ(α,−β';θα) D(α',β')
//!              = e^{iφ} exp[iτ(p − tanθα x + σ)²] exp[i tanθα x² − i√2 α x / cosθα]
//! ```
//!
//! Every `U` is a Gaussian unitary (an element of the Heisenberg–Weyl ⋊
//! SU(1,1) group), so its Fock matrix elements are computed exactly from
//! its Heisenberg action and vacuum amplitude ([`gaussian`]). The literal
//! product of exponentials ([`expm_route`]) and the defining double
//! integral ([`oracle`]) are kept as independent cross-checks.

pub mod expm_route;
pub mod gaussian;
pub mod oracle;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, default_probe, FockOperator, TruncationReport};
use crate::fracft::{reduce_angle, FracAngle, SpecialAngle, ANGLE_EPS};

pub use expm_route::bifrac_operator_expm;
pub use gaussian::{
    bifrac_gaussian, bifrac_gaussian_defining, defining_vacuum_amplitude, gaussian_fingerprint, GaussianUnitary,
};
pub use oracle::{bifrac_operator_integral, oracle_settings, OracleResult};

/// Default half-width of the forbidden band in `|cos(θα−θβ)|`.
pub const COS_DIFF_EPS: f64 = 1e-3;

/// Below this `|cos θα|` the `1/cos θα` terms are refused rather than
/// evaluated (unless the pair is a dispatched special case).
pub const COS_ALPHA_MIN: f64 = 1e-6;

/// Angle pair `(θα, θβ)`, each reduced to `(−π, π]`, outside the band
/// around `θα − θβ = ±π/2` where the prefactor vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifracAngles {
    theta_alpha: f64,
    theta_beta: f64,
}

/// Angle pairs at which `U` reduces to a displacement or displaced parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialCase {
    /// `(0, 0)`: `D(β, −α)`.
    ZeroZero,
    /// `(π/2, π/2)`: `Π(α, β)`.
    HalfHalf,
    /// `(π, π)`: `D(−β, α)`.
    PiPi,
    /// `(−π/2, −π/2)`: `Π(−α, −β)`.
    MinusHalfMinusHalf,
}

impl SpecialCase {
    pub fn angles(self) -> BifracAngles {
        let t = match self {
            SpecialCase::ZeroZero => 0.0,
            SpecialCase::HalfHalf => FRAC_PI_2,
            SpecialCase::PiPi => PI,
            SpecialCase::MinusHalfMinusHalf => -FRAC_PI_2,
        };
        BifracAngles {
            theta_alpha: t,
            theta_beta: t,
        }
    }
}

impl BifracAngles {
    pub fn new(theta_alpha: f64, theta_beta: f64) -> Result<Self> {
        Self::with_band(theta_alpha, theta_beta, COS_DIFF_EPS)
    }

    pub fn with_band(theta_alpha: f64, theta_beta: f64, eps: f64) -> Result<Self> {
        if !(theta_alpha.is_finite() && theta_beta.is_finite()) {
            return Err(Error::Invalid("angles must be finite".into()));
        }
        let cos_diff = (theta_alpha - theta_beta).cos().abs();
        if cos_diff < eps {
            return Err(Error::ForbiddenBand { cos_diff, eps });
        }
        Ok(Self {
            theta_alpha: reduce_angle(theta_alpha),
            theta_beta: reduce_angle(theta_beta),
        })
    }

    pub fn theta_alpha(self) -> f64 {
        self.theta_alpha
    }

    pub fn theta_beta(self) -> f64 {
        self.theta_beta
    }

    /// `cos(θα − θβ)`.
    pub fn cos_diff(self) -> f64 {
        (self.theta_alpha - self.theta_beta).cos()
    }

    /// `(−θα, −θβ)`, the angles of the adjoint.
    pub fn neg(self) -> Self {
        Self {
            theta_alpha: reduce_angle(-self.theta_alpha),
            theta_beta: reduce_angle(-self.theta_beta),
        }
    }

    /// Shift both angles.
    pub fn shifted(self, phi_alpha: f64, phi_beta: f64) -> Result<Self> {
        Self::new(self.theta_alpha + phi_alpha, self.theta_beta + phi_beta)
    }

    pub fn special_case(self) -> Option<SpecialCase> {
        let a = FracAngle::new(self.theta_alpha).special()?;
        let b = FracAngle::new(self.theta_beta).special()?;
        match (a, b) {
            (SpecialAngle::Zero, SpecialAngle::Zero) => Some(SpecialCase::ZeroZero),
            (SpecialAngle::HalfPi, SpecialAngle::HalfPi) => Some(SpecialCase::HalfHalf),
            (SpecialAngle::Pi, SpecialAngle::Pi) => Some(SpecialCase::PiPi),
            (SpecialAngle::MinusHalfPi, SpecialAngle::MinusHalfPi) => {
                Some(SpecialCase::MinusHalfMinusHalf)
            }
            _ => None,
        }
    }
}

/// `τ, σ, φ` of the closed operator form, from the printed formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtoParams {
    pub tau: f64,
    pub sigma: f64,
    pub phi: f64,
}

fn is_special(theta: f64, which: &[SpecialAngle]) -> bool {
    FracAngle::new(theta)
        .special()
        .is_some_and(|s| which.contains(&s))
}

/// Literal `τ`, `σ`, `φ`:
///
/// ```text
/// τ = cosθα sinθβ / cos(θα−θβ)
/// σ = α/(√2 cosθα) − β/(√2 sinθβ)
/// φ = −(θα+θβ)/2 − (α² cotθα + β² cotθβ)/2 + α²/sin2θα
/// ```
///
/// A term whose denominator vanishes at a special angle is an error
/// unless its numerator (α or β) is zero, in which case it is dropped.
pub fn bto_params(alpha: f64, beta: f64, angles: BifracAngles) -> Result<BtoParams> {
    let (ta, tb) = (angles.theta_alpha, angles.theta_beta);
    let limit = |term: &'static str| Error::SpecialAngleNeedsLimit {
        term,
        theta_alpha: ta,
        theta_beta: tb,
    };
    let half = [SpecialAngle::HalfPi, SpecialAngle::MinusHalfPi];
    let flat = [SpecialAngle::Zero, SpecialAngle::Pi];

    let tau = ta.cos() * tb.sin() / (ta - tb).cos();

    let mut sigma = 0.0;
    if alpha != 0.0 {
        if is_special(ta, &half) {
            return Err(limit("α/(√2 cos θα)"));
        }
        sigma += alpha / (SQRT_2 * ta.cos());
    }
    if beta != 0.0 {
        if is_special(tb, &flat) {
            return Err(limit("β/(√2 sin θβ)"));
        }
        sigma -= beta / (SQRT_2 * tb.sin());
    }

    let mut phi = -(ta + tb) / 2.0;
    if alpha != 0.0 {
        if is_special(ta, &flat) {
            return Err(limit("α² cot θα"));
        }
        if is_special(ta, &half) || is_special(ta, &flat) {
            return Err(limit("α²/sin 2θα"));
        }
        phi += -alpha * alpha / (2.0 * ta.tan()) + alpha * alpha / (2.0 * ta).sin();
    }
    if beta != 0.0 {
        if is_special(tb, &flat) {
            return Err(limit("β² cot θβ"));
        }
        phi -= beta * beta / (2.0 * tb.tan());
    }
    Ok(BtoParams { tau, sigma, phi })
}

/// The closed form regrouped so that it stays finite at θβ ∈ {0, π} and
/// θα ∈ {0, π}:
///
/// ```text
/// U = e^{iφ'} exp[i(τK² − 2τ_b K)] exp[i(t x² − √2 α x / c)]
/// K = p − t x + s,  t = tanθα,  c = cosθα,  s = α/(√2 c)
/// τ_b = β c / (√2 cos(θα−θβ))
/// φ' = −(θα+θβ)/2 + α² t/2 − β² tan(θα−θβ)/2
/// ```
///
/// Expanding `τ(K − β/(√2 sinθβ))²` reproduces the printed `τσ²` and `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BtoFactors {
    pub t: f64,
    pub c: f64,
    pub tau: f64,
    pub tau_b: f64,
    pub s: f64,
    pub phase: f64,
}

pub fn bto_factors(alpha: f64, beta: f64, angles: BifracAngles) -> Result<BtoFactors> {
    let (ta, tb) = (angles.theta_alpha, angles.theta_beta);
    let c = ta.cos();
    if c.abs() < COS_ALPHA_MIN {
        return Err(Error::SpecialAngleNeedsLimit {
            term: "1/cos θα",
            theta_alpha: ta,
            theta_beta: tb,
        });
    }
    let t = ta.tan();
    let cd = (ta - tb).cos();
    Ok(BtoFactors {
        t,
        c,
        tau: c * tb.sin() / cd,
        tau_b: beta * c / (SQRT_2 * cd),
        s: alpha / (SQRT_2 * c),
        phase: -(ta + tb) / 2.0 + alpha * alpha * t / 2.0 - beta * beta * (ta - tb).tan() / 2.0,
    })
}

/// `U` at one of the special angle pairs, from the truncated-exponential
/// displacement and parity operators of [`fock`].
pub fn special_case_operator(
    alpha: f64,
    beta: f64,
    which: SpecialCase,
    dim: usize,
) -> Result<FockOperator> {
    match which {
        SpecialCase::ZeroZero => fock::displacement(beta, -alpha, dim),
        SpecialCase::HalfHalf => fock::parity(alpha, beta, dim),
        SpecialCase::PiPi => fock::displacement(-beta, alpha, dim),
        SpecialCase::MinusHalfMinusHalf => fock::parity(-alpha, -beta, dim),
    }
}

/// `U(α,β;θα,θβ)` truncated to `dim` number states.
///
/// Special angle pairs dispatch to [`special_case_operator`]; all other
/// admissible pairs use exact Gaussian matrix elements, with the report's
/// edge weight including the probability each column loses past `dim`.
pub fn bifrac_operator(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
    dim: usize,
) -> Result<(FockOperator, TruncationReport)> {
    if let Some(case) = angles.special_case() {
        let op = special_case_operator(alpha, beta, case, dim)?;
        let report = op.truncation_report();
        return Ok((op, report));
    }
    let (g, g00) = bifrac_gaussian(alpha, beta, angles)?;
    let (m, leak) = g.fock_elements(g00, dim)?;
    let report = TruncationReport::for_operator(&m.view(), default_probe(dim), Some(&leak));
    Ok((FockOperator::new(m)?, report))
}

/// Like [`bifrac_operator`] but with closed-form elements at the special
/// pairs too, so the result has no truncation error of its own anywhere.
pub fn bifrac_operator_exact(
    alpha: f64,
    beta: f64,
    angles: BifracAngles,
    dim: usize,
) -> Result<(FockOperator, TruncationReport)> {
    let (g, g00) = bifrac_gaussian(alpha, beta, angles)?;
    let (m, leak) = g.fock_elements(g00, dim)?;
    let report = TruncationReport::for_operator(&m.view(), default_probe(dim), Some(&leak));
    Ok((FockOperator::new(m)?, report))
}

/// Tolerance used when deciding whether an angle sits on a special value.
pub fn angle_eps() -> f64 {
    ANGLE_EPS
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn forbidden_band() {
        assert!(matches!(
            BifracAngles::new(FRAC_PI_2, 0.0),
            Err(Error::ForbiddenBand { .. })
        ));
        assert!(BifracAngles::new(FRAC_PI_2 + 2e-3, 0.0).is_ok());
        assert!(BifracAngles::new(0.3, 0.3 - FRAC_PI_2 + 5e-4).is_err());
    }

    #[test]
    fn special_pair_detection() {
        let a = BifracAngles::new(0.0, 0.0).unwrap();
        assert_eq!(a.special_case(), Some(SpecialCase::ZeroZero));
        let a = BifracAngles::new(-PI, PI).unwrap();
        assert_eq!(a.special_case(), Some(SpecialCase::PiPi));
        assert_eq!(BifracAngles::new(FRAC_PI_2, 0.3).unwrap().special_case(), None);
        assert_eq!(BifracAngles::new(1e-4, 1e-4).unwrap().special_case(), None);
    }

    #[test]
    fn params_hand_values() {
        let p = bto_params(0.0, 0.0, BifracAngles::new(FRAC_PI_4, FRAC_PI_4).unwrap()).unwrap();
        assert_abs_diff_eq!(p.tau, 0.5, epsilon = 1e-15);
        assert_eq!(p.sigma, 0.0);
        assert_abs_diff_eq!(p.phi, -FRAC_PI_4, epsilon = 1e-15);
        for &t in &[0.2, 0.9, -1.1] {
            let p = bto_params(0.7, -0.4, BifracAngles::new(t, t).unwrap()).unwrap();
            assert_abs_diff_eq!(p.tau, (2.0 * t).sin() / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn params_reference_point() {
        // (α,β) = (1,1), θα = 0.3, θβ = 0.1, evaluated with 50-digit arithmetic.
        let p = bto_params(1.0, 1.0, BifracAngles::new(0.3, 0.1).unwrap()).unwrap();
        assert_abs_diff_eq!(p.tau, 0.097_314_313_040_724_97, epsilon = 1e-14);
        assert_abs_diff_eq!(p.sigma, -6.342_701_533_030_738, epsilon = 1e-13);
        assert_abs_diff_eq!(p.phi, -5.028_654_086_824_807, epsilon = 1e-13);
    }

    #[test]
    fn params_special_terms() {
        let at = |a, b, ta, tb| bto_params(a, b, BifracAngles::new(ta, tb).unwrap());
        assert!(matches!(
            at(1.0, 0.0, FRAC_PI_2, 0.4),
            Err(Error::SpecialAngleNeedsLimit { term: "α/(√2 cos θα)", .. })
        ));
        assert!(matches!(
            at(0.0, 1.0, 0.4, 0.0),
            Err(Error::SpecialAngleNeedsLimit { term: "β/(√2 sin θβ)", .. })
        ));
        assert!(matches!(
            at(1.0, 0.0, 0.0, 0.4),
            Err(Error::SpecialAngleNeedsLimit { term: "α² cot θα", .. })
        ));
        // vanishing numerators drop the singular terms
        assert!(at(0.0, 1.0, FRAC_PI_2, 0.4).is_ok());
        assert!(at(1.0, 0.0, 0.4, 0.0).is_ok());
    }

    #[test]
    fn regrouped_form_matches_literal_parameters() {
        // τ(K − b)² + 2τ_b K expanded: constant terms must reproduce φ.
        for &(a, b, ta, tb) in &[(1.0, 1.0, 0.3, 0.1), (-0.4, 0.8, 1.1, -0.6), (0.5, -2.0, -0.7, 2.5)] {
            let angles = BifracAngles::new(ta, tb).unwrap();
            let p = bto_params(a, b, angles).unwrap();
            let f = bto_factors(a, b, angles).unwrap();
            let shift = b / (SQRT_2 * tb.sin());
            // σ = s − shift and τσ² − τs² + 2τ_b s + ... collapses to the phase difference
            assert_abs_diff_eq!(p.sigma, f.s - shift, epsilon = 1e-12);
            assert_abs_diff_eq!(f.tau * shift, f.tau_b, epsilon = 1e-12);
            assert_abs_diff_eq!(p.phi + p.tau * shift * shift, f.phase, epsilon = 1e-11);
        }
    }

    #[test]
    fn near_half_pi_refused() {
        let angles = BifracAngles::new(FRAC_PI_2 - 1e-7, 0.3).unwrap();
        assert!(matches!(
            bifrac_operator(0.5, 0.5, angles, 16),
            Err(Error::SpecialAngleNeedsLimit { .. })
        ));
    }
}
