//! Fractional Fourier transform kernel and its action on sampled functions.
//!
//! The kernel is
//!
//! ```text
//! Δ(x,y;θ) = [(1 + i cot θ)/2π]^{1/2} exp[−i(x²+y²)cot θ/2 + i x y / sin θ]
//! ```
//!
//! with the principal square root. With that branch the n-th Hermite
//! function is an eigenfunction with eigenvalue `e^{inθ}` on all of
//! `(−π, π]`, and kernels compose additively in the angle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{QuadratureSettings, UniformGrid};

/// Distance from 0, ±π/2, π below which an angle counts as special.
pub const ANGLE_EPS: f64 = 1e-9;

/// Relative boundary magnitude accepted by [`apply_fracft`].
pub const TAIL_EPS: f64 = 1e-8;

/// Angles at which the kernel degenerates to a δ function or a plain
/// Fourier kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialAngle {
    Zero,
    HalfPi,
    Pi,
    MinusHalfPi,
}

impl SpecialAngle {
    pub fn value(self) -> f64 {
        match self {
            SpecialAngle::Zero => 0.0,
            SpecialAngle::HalfPi => FRAC_PI_2,
            SpecialAngle::Pi => PI,
            SpecialAngle::MinusHalfPi => -FRAC_PI_2,
        }
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let mut r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    // rem_euclid can land exactly on −π after the shift for inputs like −π.
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

/// A transform angle reduced to `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracAngle {
    theta: f64,
}

impl FracAngle {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: reduce_angle(theta),
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    /// Classification with the default tolerance [`ANGLE_EPS`].
    pub fn special(self) -> Option<SpecialAngle> {
        self.special_within(ANGLE_EPS)
    }

    pub fn special_within(self, eps: f64) -> Option<SpecialAngle> {
        let t = self.theta;
        [
            SpecialAngle::Zero,
            SpecialAngle::HalfPi,
            SpecialAngle::Pi,
            SpecialAngle::MinusHalfPi,
        ]
        .into_iter()
        .find(|s| {
            let d = (t - s.value()).abs();
            // π and −π are the same point; the reduced range only contains π.
            d < eps || (*s == SpecialAngle::Pi && (t + PI).abs() < eps)
        })
    }

    pub fn is_regular(self) -> bool {
        self.special().is_none()
    }

    pub fn neg(self) -> Self {
        Self::new(-self.theta)
    }
}

impl std::ops::Add for FracAngle {
    type Output = FracAngle;

    fn add(self, rhs: Self) -> Self {
        FracAngle::new(self.theta + rhs.theta)
    }
}

/// `[(1 + i cot θ)/2π]^{1/2}` on the principal branch.
fn prefactor(theta: f64) -> C64 {
    (C64::new(1.0, 1.0 / theta.tan()) / (2.0 * PI)).sqrt()
}

/// Kernel value at real arguments.
pub fn kernel_value(x: f64, y: f64, theta: FracAngle) -> Result<C64> {
    kernel_value_complex(C64::from(x), C64::from(y), theta)
}

/// Kernel continued to complex arguments; used by the contour-rotated
/// composition oracle.
///
/// At ±π/2 the formula is finite and is evaluated with `cot θ = 0`,
/// `sin θ = ±1` exactly; 0 and π are refused.
pub fn kernel_value_complex(x: C64, y: C64, theta: FracAngle) -> Result<C64> {
    let (cot, sin, pre) = match theta.special() {
        Some(SpecialAngle::Zero) | Some(SpecialAngle::Pi) => {
            return Err(Error::SpecialAngle { theta: theta.theta() })
        }
        Some(SpecialAngle::HalfPi) => (0.0, 1.0, C64::from(1.0 / (2.0 * PI).sqrt())),
        Some(SpecialAngle::MinusHalfPi) => (0.0, -1.0, C64::from(1.0 / (2.0 * PI).sqrt())),
        None => {
            let t = theta.theta();
            (1.0 / t.tan(), t.sin(), prefactor(t))
        }
    };
    let phase = C64::i() * (-(x * x + y * y) * cot / 2.0 + x * y / sin);
    Ok(pre * phase.exp())
}

/// Complex samples on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grid: UniformGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("sampled function has non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Discrete L² norm with trapezoid weights.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, v)| self.grid.trapezoid_weight(k) * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Discrete L² distance to another function on the same grid.
    pub fn l2_distance(&self, other: &SampledFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Invalid("functions live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(k, (a, b))| self.grid.trapezoid_weight(k) * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Discrete inner product ⟨self|other⟩.
    pub fn inner(&self, other: &SampledFunction) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::Invalid("functions live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(k, (a, b))| a.conj() * b * self.grid.trapezoid_weight(k))
            .sum())
    }

    fn edge_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self.values[0].norm().max(self.values[self.values.len() - 1].norm());
        edge / peak
    }
}

/// Apply the fractional Fourier transform at `theta`, returning samples on
/// the same grid.
///
/// Regular angles use the trapezoid rule on the closed-form kernel; the
/// special angles use their δ-function or plain Fourier forms.
pub fn apply_fracft(f: &SampledFunction, theta: FracAngle) -> Result<SampledFunction> {
    let edge = f.edge_ratio();
    if edge > TAIL_EPS {
        return Err(Error::TailTooFat { edge });
    }
    let grid = *f.grid();
    let t = theta.theta();
    let values = match theta.special() {
        Some(SpecialAngle::Zero) => f.values.clone(),
        Some(SpecialAngle::Pi) => {
            if !grid.is_symmetric() {
                return Err(Error::AsymmetricGrid {
                    first: grid.start(),
                    last: grid.end(),
                });
            }
            f.values.iter().rev().copied().collect()
        }
        Some(SpecialAngle::HalfPi) => fourier_quadrature(f, 1.0),
        Some(SpecialAngle::MinusHalfPi) => fourier_quadrature(f, -1.0),
        None => {
            let pre = prefactor(t);
            let cot = 1.0 / t.tan();
            let csc = 1.0 / t.sin();
            // The chirp in y does not depend on the output point.
            let chirped: Vec<C64> = grid
                .points()
                .zip(&f.values)
                .enumerate()
                .map(|(k, (y, v))| {
                    v * C64::from_polar(grid.trapezoid_weight(k), -y * y * cot / 2.0)
                })
                .collect();
            (0..grid.len())
                .into_par_iter()
                .map(|i| {
                    let x = grid.point(i);
                    let acc: C64 = grid
                        .points()
                        .zip(&chirped)
                        .map(|(y, c)| c * C64::from_polar(1.0, x * y * csc))
                        .sum();
                    pre * C64::from_polar(1.0, -x * x * cot / 2.0) * acc
                })
                .collect()
        }
    };
    SampledFunction::new(grid, values)
}

fn fourier_quadrature(f: &SampledFunction, sign: f64) -> Vec<C64> {
    let grid = *f.grid();
    let norm = 1.0 / (2.0 * PI).sqrt();
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let acc: C64 = grid
                .points()
                .zip(&f.values)
                .enumerate()
                .map(|(k, (y, v))| v * C64::from_polar(grid.trapezoid_weight(k), sign * x * y))
                .sum();
            norm * acc
        })
        .collect()
}

/// Numerically evaluate `∫dy Δ(x,y;θ₁)Δ(y,z;θ₂)`.
///
/// The integrand has constant modulus on the real line, so the contour is
/// rotated by `∓π/4` onto the steepest-descent direction of the quadratic
/// phase, where it decays like a Gaussian. The trapezoid rule is refined
/// (half step, wider box) until two rounds agree to `settings.tol`.
pub fn compose_kernels(
    theta1: FracAngle,
    theta2: FracAngle,
    x: f64,
    z: f64,
    settings: &QuadratureSettings,
) -> Result<C64> {
    settings.validate()?;
    for t in [theta1, theta2, theta1 + theta2] {
        if matches!(t.special(), Some(SpecialAngle::Zero | SpecialAngle::Pi)) {
            return Err(Error::SpecialAngle { theta: t.theta() });
        }
    }
    let (t1, t2) = (theta1.theta(), theta2.theta());
    let curvature = 1.0 / t1.tan() + 1.0 / t2.tan();
    let slope = x / t1.sin() + z / t2.sin();
    let rot = C64::from_polar(1.0, -curvature.signum() * PI / 4.0);

    // Gaussian envelope exp(−|c| s²/2 + |k| s/√2): centre and width.
    let c = curvature.abs();
    let centre = slope.abs() / (2f64.sqrt() * c);
    let width = (2.0 * 40.0 / c).sqrt();
    let mut half = settings.half_width.unwrap_or(centre + width);
    let mut step = settings.step.min(0.5 / c.sqrt());

    let integrate = |half: f64, step: f64| -> Result<(C64, f64)> {
        let n = (half / step).ceil() as i64;
        let mut acc = C64::new(0.0, 0.0);
        let mut tail = 0.0f64;
        for k in -n..=n {
            let s = k as f64 * step;
            let y = rot * s;
            let v = kernel_value_complex(C64::from(x), y, theta1)?
                * kernel_value_complex(y, C64::from(z), theta2)?;
            if k.abs() == n {
                tail = tail.max(v.norm());
            }
            acc += v;
        }
        Ok((acc * rot * step, tail))
    };

    let (mut prev, _) = integrate(half, step)?;
    let mut last_change = f64::INFINITY;
    let mut last_tail = f64::INFINITY;
    for _ in 0..=settings.max_doublings {
        half *= settings.growth;
        step /= 2.0;
        let (next, tail) = integrate(half, step)?;
        last_change = (next - prev).norm();
        last_tail = tail;
        prev = next;
        if last_change < settings.tol && tail < settings.tol {
            return Ok(next);
        }
    }
    Err(Error::QuadratureDivergence {
        what: "kernel composition",
        change: last_change,
        tail: last_tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn reduction_range() {
        assert_abs_diff_eq!(reduce_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(reduce_angle(-PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(reduce_angle(-0.5), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(reduce_angle(2.0 * PI + 0.25), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn classification() {
        assert_eq!(FracAngle::new(0.0).special(), Some(SpecialAngle::Zero));
        assert_eq!(FracAngle::new(-PI).special(), Some(SpecialAngle::Pi));
        assert_eq!(FracAngle::new(-FRAC_PI_2 + 1e-10).special(), Some(SpecialAngle::MinusHalfPi));
        assert_eq!(FracAngle::new(FRAC_PI_2 + 1e-8).special(), None);
        assert!(FracAngle::new(1.0).is_regular());
    }

    #[test]
    fn kernel_refuses_special_angles() {
        assert!(matches!(
            kernel_value(0.0, 0.0, FracAngle::new(0.0)),
            Err(Error::SpecialAngle { .. })
        ));
        assert!(kernel_value(0.0, 0.0, FracAngle::new(PI)).is_err());
    }

    #[test]
    fn kernel_at_quarter_turn() {
        let v = kernel_value(0.0, 0.0, FracAngle::new(FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
        let v = kernel_value(1.0, 2.0, FracAngle::new(FRAC_PI_2)).unwrap();
        let expect = C64::from_polar(1.0 / (2.0 * PI).sqrt(), 2.0);
        assert_abs_diff_eq!((v - expect).norm(), 0.0, epsilon = 1e-15);
        let v = kernel_value(1.0, 2.0, FracAngle::new(-FRAC_PI_2)).unwrap();
        assert_abs_diff_eq!((v - expect.conj()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kernel_near_quarter_turn_is_fourier() {
        // Just off the special point the closed form is evaluable and
        // must approach e^{ixy}/√(2π).
        let t = FracAngle::new(FRAC_PI_2 - 1e-7);
        let v = kernel_value(1.0, 2.0, t).unwrap();
        let expect = C64::from_polar(1.0 / (2.0 * PI).sqrt(), 2.0);
        assert_abs_diff_eq!((v - expect).norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn kernel_modulus_depends_only_on_angle() {
        for &t in &[0.3, 1.2, -0.7, 2.9, -2.5] {
            let theta = FracAngle::new(t);
            let expect = (C64::new(1.0, 1.0 / t.tan()).norm() / (2.0 * PI)).sqrt();
            for &(x, y) in &[(0.0, 0.0), (1.5, -2.0), (-4.0, 3.3)] {
                let v = kernel_value(x, y, theta).unwrap();
                assert_abs_diff_eq!(v.norm(), expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pi_needs_symmetric_grid() {
        let grid = UniformGrid::linspace(-8.0, 9.0, 300).unwrap();
        let f = SampledFunction::from_fn(grid, |x| C64::from((-x * x).exp()));
        assert!(matches!(
            apply_fracft(&f, FracAngle::new(PI)),
            Err(Error::AsymmetricGrid { .. })
        ));
    }

    #[test]
    fn fat_tails_rejected() {
        let grid = UniformGrid::linspace(-2.0, 2.0, 64).unwrap();
        let f = SampledFunction::from_fn(grid, |x| C64::from((-x * x / 2.0).exp()));
        assert!(matches!(
            apply_fracft(&f, FracAngle::new(0.7)),
            Err(Error::TailTooFat { .. })
        ));
    }

    #[test]
    fn composition_examples() {
        let s = QuadratureSettings::default().with_tol(1e-12);
        let q = FRAC_PI_4;
        let v = compose_kernels(FracAngle::new(q), FracAngle::new(q), 0.0, 0.0, &s).unwrap();
        assert!((v - 1.0 / (2.0 * PI).sqrt()).norm() < 1e-10, "{v}");
        let v = compose_kernels(FracAngle::new(PI / 3.0), FracAngle::new(PI / 6.0), 1.0, 1.0, &s).unwrap();
        assert!((v - C64::from_polar(1.0 / (2.0 * PI).sqrt(), 1.0)).norm() < 1e-10, "{v}");
        let v = compose_kernels(FracAngle::new(0.3), FracAngle::new(0.4), 0.5, -0.2, &s).unwrap();
        let k = kernel_value(0.5, -0.2, FracAngle::new(0.7)).unwrap();
        assert!((v - k).norm() < 1e-10, "{v} vs {k}");
        assert!(compose_kernels(FracAngle::new(1.0), FracAngle::new(-1.0), 0.0, 0.0, &s).is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let grid = UniformGrid::linspace(-8.0, 8.0, 128).unwrap();
        let f = SampledFunction::from_fn(grid, |x| C64::new((-x * x).exp(), x * (-x * x).exp()));
        assert_eq!(apply_fracft(&f, FracAngle::new(0.0)).unwrap(), f);
    }
}
