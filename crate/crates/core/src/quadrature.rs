use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings shared by the quadrature-based routines (oracles, P function,
/// transforms over state families).
///
/// Each refinement round halves the step and widens the domain by
/// `growth`; a result is accepted once two consecutive rounds differ by
/// less than `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    /// Half-width of the integration box per axis. `None` lets the routine
    /// pick its own default from the problem parameters.
    pub half_width: Option<f64>,
    /// Step of the first round.
    pub step: f64,
    /// Maximum number of refinement rounds after the first.
    pub max_doublings: u32,
    /// Accepted change between consecutive rounds (max-abs).
    pub tol: f64,
    /// Factor applied to the half-width each round.
    pub growth: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            half_width: None,
            step: 0.1,
            max_doublings: 3,
            tol: 1e-8,
            growth: 1.25,
        }
    }
}

impl QuadratureSettings {
    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = Some(half_width);
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_doublings(mut self, rounds: u32) -> Self {
        self.max_doublings = rounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Invalid(format!("quadrature step {} must be positive", self.step)));
        }
        if let Some(w) = self.half_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Invalid(format!("half width {w} must be positive")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid("quadrature tolerance must be positive".into()));
        }
        if !(self.growth >= 1.0) {
            return Err(Error::Invalid("domain growth factor must be >= 1".into()));
        }
        Ok(())
    }
}

/// Uniform real lattice `start + k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(Error::Invalid(format!("grid step {step} must be positive and finite")));
        }
        Ok(Self { start, step, count })
    }

    /// `count` points from `min` to `max` inclusive.
    pub fn linspace(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if !(max > min) {
            return Err(Error::Invalid(format!("grid range [{min}, {max}] is empty")));
        }
        Self::new(min, (max - min) / (count - 1) as f64, count)
    }

    /// Symmetric grid on `[-half_width, half_width]` with spacing at most `step`.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        let half = (half_width / step).ceil().max(1.0) as usize;
        Self::linspace(-(half as f64) * step, half as f64 * step, 2 * half + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn end(&self) -> f64 {
        self.start + (self.count - 1) as f64 * self.step
    }

    /// On a symmetric grid the upper half mirrors the lower half exactly,
    /// so `point(n−1−k) == −point(k)` bit for bit.
    pub fn point(&self, k: usize) -> f64 {
        let mirror = self.count - 1 - k;
        if mirror < k && self.is_symmetric() {
            -(self.start + mirror as f64 * self.step)
        } else if mirror == k && self.is_symmetric() {
            0.0
        } else {
            self.start + k as f64 * self.step
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.point(k))
    }

    /// Symmetric about zero to within a few ulps of the extent.
    pub fn is_symmetric(&self) -> bool {
        let scale = self.start.abs().max(self.end().abs()).max(1.0);
        (self.start + self.end()).abs() <= 1e-12 * scale
    }

    /// Trapezoid weights (half weight at both ends).
    pub fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.count {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

/// Result of a certified quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    /// Max-abs change of the last refinement round.
    pub change: f64,
    /// Largest integrand magnitude on the boundary of the last round.
    pub tail: f64,
}

/// Trapezoid rule for `K` integrands at once on `[center − h, center + h]`,
/// refined per `settings` until the change and the boundary magnitude are
/// both below `settings.tol`. `half_width` is the default used when the
/// settings leave it open.
pub fn integrate_line<const K: usize>(
    f: impl Fn(f64) -> [num_complex::Complex64; K],
    center: f64,
    half_width: f64,
    settings: &QuadratureSettings,
    what: &'static str,
) -> Result<Certified<[num_complex::Complex64; K]>> {
    use num_complex::Complex64 as C64;
    settings.validate()?;
    let mut half = settings.half_width.unwrap_or(half_width);
    let mut step = settings.step;
    let round = |half: f64, step: f64| -> Result<([C64; K], f64)> {
        let grid = UniformGrid::symmetric(half, step)?;
        let mut acc = [C64::new(0.0, 0.0); K];
        let mut tail = 0.0f64;
        for k in 0..grid.len() {
            let v = f(center + grid.point(k));
            let w = grid.trapezoid_weight(k);
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                *a += x * w;
            }
            if k == 0 || k + 1 == grid.len() {
                tail = v.iter().map(|x| x.norm()).fold(tail, f64::max);
            }
        }
        Ok((acc, tail))
    };
    let (mut prev, _) = round(half, step)?;
    let mut change = f64::INFINITY;
    let mut tail = f64::INFINITY;
    for _ in 0..settings.max_doublings.max(1) {
        half *= settings.growth;
        step /= 2.0;
        let (next, t) = round(half, step)?;
        change = next
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        tail = t;
        prev = next;
        if change < settings.tol && tail < settings.tol {
            return Ok(Certified { value: prev, change, tail });
        }
    }
    Err(Error::QuadratureDivergence { what, change, tail })
}
