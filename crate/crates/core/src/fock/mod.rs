//! Truncated number-basis linear algebra.
//!
//! Conventions: `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so `[x, p] = i`,
//! and `D(α,β) = exp(i√2 β x − i√2 α p) = exp(λa† − λ*a)` with `λ = α + iβ`.

pub mod expm;
pub mod hermite;

use std::f64::consts::SQRT_2;

use ndarray::{s, Array1, Array2, ArrayView2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::Sig17;

/// Smallest supported Fock dimension.
pub const MIN_DIM: usize = 4;

/// Edge mass below which a truncated result is trusted.
pub const EDGE_EPS: f64 = 1e-6;

/// Default norm slack for physical states.
pub const NORM_EPS: f64 = 1e-3;

/// `⌊0.9 N⌋`: size of the interior block where invariants are asserted.
pub fn interior_dim(dim: usize) -> usize {
    9 * dim / 10
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < MIN_DIM {
        Err(Error::DimTooSmall { dim })
    } else {
        Ok(())
    }
}

/// How much of a truncated result sits next to the cutoff.
///
/// `edge_weight` is the probability in the top 10% of the basis (rows
/// `⌊0.9N⌋..N`), plus any mass known to have leaked past `N`. For an
/// operator it is the worst case over the probed columns; `trusted_dim`
/// counts the leading columns that individually pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub edge_weight: f64,
    pub trusted: bool,
    pub trusted_dim: usize,
}

impl TruncationReport {
    pub fn from_edge_weight(edge_weight: f64, trusted_dim: usize) -> Self {
        Self {
            edge_weight,
            trusted: edge_weight < EDGE_EPS,
            trusted_dim,
        }
    }

    /// Report for a state vector; `leakage` is mass known to lie beyond
    /// the basis.
    pub fn for_state(amplitudes: &Array1<C64>, leakage: f64) -> Self {
        let dim = amplitudes.len();
        let edge: f64 = amplitudes
            .slice(s![interior_dim(dim)..])
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            + leakage.max(0.0);
        let trusted = edge < EDGE_EPS;
        Self {
            edge_weight: edge,
            trusted,
            trusted_dim: if trusted { dim } else { 0 },
        }
    }

    /// Report for an operator, probing its first `probe` columns.
    pub fn for_operator(matrix: &ArrayView2<C64>, probe: usize, leakage: Option<&[f64]>) -> Self {
        let dim = matrix.nrows();
        let start = interior_dim(dim);
        let column_edge = |j: usize| -> f64 {
            let tail: f64 = matrix
                .slice(s![start.., j])
                .iter()
                .map(|v| v.norm_sqr())
                .sum();
            tail + leakage.map_or(0.0, |l| l[j].max(0.0))
        };
        let edges: Vec<f64> = (0..matrix.ncols()).map(column_edge).collect();
        let trusted_dim = edges.iter().take_while(|&&e| e < EDGE_EPS).count();
        let edge_weight = edges[..probe.clamp(1, edges.len())]
            .iter()
            .copied()
            .fold(0.0, f64::max);
        Self::from_edge_weight(edge_weight, trusted_dim)
    }

    /// Combine two reports conservatively.
    pub fn worst(self, other: Self) -> Self {
        Self {
            edge_weight: self.edge_weight.max(other.edge_weight),
            trusted: self.trusted && other.trusted,
            trusted_dim: self.trusted_dim.min(other.trusted_dim),
        }
    }
}

/// Default number of columns probed by operator reports: `⌈N/4⌉`.
pub fn default_probe(dim: usize) -> usize {
    dim.div_ceil(4)
}

/// Square complex matrix in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: Array2<C64>,
}

impl FockOperator {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Invalid(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_dim(matrix.nrows())?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("operator has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Array2<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_matrix_unchecked(Array2::eye(dim)))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_matrix_unchecked(Array2::zeros((dim, dim))))
    }

    /// Diagonal operator.
    pub fn diagonal(values: &[C64]) -> Result<Self> {
        check_dim(values.len())?;
        let mut m = Array2::zeros((values.len(), values.len()));
        for (k, v) in values.iter().enumerate() {
            m[[k, k]] = *v;
        }
        Self::new(m)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(state: &FockState) -> Self {
        let v = state.amplitudes();
        let n = v.len();
        Self::from_matrix_unchecked(Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[[row, col]]
    }

    pub fn dagger(&self) -> Self {
        Self::from_matrix_unchecked(self.matrix.t().mapv(|v| v.conj()))
    }

    pub fn dot(&self, other: &FockOperator) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(self.matrix.dot(&other.matrix)))
    }

    pub fn add(&self, other: &FockOperator) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &FockOperator) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_matrix_unchecked(self.matrix.mapv(|v| v * factor))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.dim() != self.dim() {
            return Err(Error::Invalid(format!(
                "operator of dim {} applied to state of dim {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(FockState::raw(self.matrix.dot(state.amplitudes())))
    }

    /// Largest entry modulus of `self − other` on the leading `k×k` block.
    pub fn max_abs_diff(&self, other: &FockOperator, k: usize) -> Result<f64> {
        self.same_dim(other)?;
        let k = k.min(self.dim());
        Ok(self
            .matrix
            .slice(s![..k, ..k])
            .iter()
            .zip(other.matrix.slice(s![..k, ..k]).iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Like [`max_abs_diff`](Self::max_abs_diff) after removing the best
    /// constant phase `e^{iγ}` from `other`; returns `(deviation, e^{iγ})`
    /// with `self ≈ e^{iγ}·other`.
    pub fn max_abs_diff_up_to_phase(&self, other: &FockOperator, k: usize) -> Result<(f64, C64)> {
        self.same_dim(other)?;
        let k = k.min(self.dim());
        let a = self.matrix.slice(s![..k, ..k]);
        let b = other.matrix.slice(s![..k, ..k]);
        let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let dev = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| (x - phase * y).norm())
            .fold(0.0, f64::max);
        Ok((dev, phase))
    }

    /// `max |(U†U − 1)ᵢⱼ|` over the leading `k×k` block.
    pub fn unitarity_defect(&self, k: usize) -> f64 {
        let k = k.min(self.dim());
        let g = self.matrix.t().mapv(|v| v.conj()).dot(&self.matrix);
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[[i, j]] - target).norm());
            }
        }
        worst
    }

    /// `max |(A − A†)ᵢⱼ|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Truncation report over the default probe columns.
    pub fn truncation_report(&self) -> TruncationReport {
        TruncationReport::for_operator(&self.matrix.view(), default_probe(self.dim()), None)
    }

    /// One past the largest index touched by a nonzero row or column.
    pub fn support_dim(&self) -> usize {
        let n = self.dim();
        (0..n)
            .rev()
            .find(|&k| {
                self.matrix.row(k).iter().any(|v| v.norm() > 1e-14)
                    || self.matrix.column(k).iter().any(|v| v.norm() > 1e-14)
            })
            .map_or(1, |k| k + 1)
    }

    /// Copy into a larger or smaller basis (zero padding or truncation).
    pub fn resized(&self, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let k = dim.min(self.dim());
        let mut m = Array2::zeros((dim, dim));
        m.slice_mut(s![..k, ..k]).assign(&self.matrix.slice(s![..k, ..k]));
        Ok(Self::from_matrix_unchecked(m))
    }

    fn same_dim(&self, other: &FockOperator) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )))
        }
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[Sig17; 2]>> = self
            .matrix
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|v| [Sig17(v.re), Sig17(v.im)]).collect())
            .collect();
        serde_json::to_string(&OperatorJsonOut { dim: self.dim(), rows }).expect("finite entries")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: OperatorJsonIn =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if parsed.rows.len() != parsed.dim || parsed.rows.iter().any(|r| r.len() != parsed.dim) {
            return Err(Error::Format(format!("rows do not form a {0}x{0} matrix", parsed.dim)));
        }
        let flat: Vec<C64> = parsed
            .rows
            .into_iter()
            .flatten()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        let m = Array2::from_shape_vec((parsed.dim, parsed.dim), flat)
            .map_err(|e| Error::Format(e.to_string()))?;
        Self::new(m)
    }
}

#[derive(Serialize)]
struct OperatorJsonOut {
    dim: usize,
    rows: Vec<Vec<[Sig17; 2]>>,
}

#[derive(Deserialize)]
struct OperatorJsonIn {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct StateJsonOut {
    dim: usize,
    rows: Vec<[Sig17; 2]>,
}

#[derive(Deserialize)]
struct StateJsonIn {
    dim: usize,
    rows: Vec<[f64; 2]>,
}

/// Complex amplitude vector in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: Array1<C64>,
}

impl FockState {
    /// A physical state: dimension at least 4 and norm in `[1 − NORM_EPS, 1 + 1e-9]`.
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        let state = Self::checked_raw(amplitudes)?;
        let norm = state.norm();
        if !(norm >= 1.0 - NORM_EPS && norm <= 1.0 + 1e-9) {
            return Err(Error::Invalid(format!("state norm {norm} outside [1-εnorm, 1]")));
        }
        Ok(state)
    }

    /// An unnormalized vector; dimension and finiteness are still checked.
    pub fn checked_raw(amplitudes: Array1<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if amplitudes.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("state has non-finite amplitudes".into()));
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn raw(amplitudes: Array1<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn number(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::Invalid(format!("|{n}⟩ does not fit in dimension {dim}")));
        }
        let mut v = Array1::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, eps: f64) -> bool {
        let n = self.norm();
        n >= 1.0 - eps && n <= 1.0 + 1e-9
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Invalid("cannot normalize the zero vector".into()));
        }
        Ok(Self::raw(self.amplitudes.mapv(|v| v / n)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Invalid("state dimensions differ".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &FockOperator) -> Result<C64> {
        self.inner(&op.apply(self)?)
    }

    pub fn truncation_report(&self) -> TruncationReport {
        TruncationReport::for_state(&self.amplitudes, 0.0)
    }

    pub fn add_scaled(&self, factor: C64, other: &FockState) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Invalid("state dimensions differ".into()));
        }
        Ok(Self::raw(&self.amplitudes + &other.amplitudes.mapv(|v| v * factor)))
    }

    pub fn to_json(&self) -> String {
        let rows = self
            .amplitudes
            .iter()
            .map(|v| [Sig17(v.re), Sig17(v.im)])
            .collect();
        serde_json::to_string(&StateJsonOut { dim: self.dim(), rows }).expect("finite amplitudes")
    }

    /// Parses a state; the result is unnormalized (call
    /// [`is_normalized`](Self::is_normalized) to check).
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: StateJsonIn =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if parsed.rows.len() != parsed.dim {
            return Err(Error::Format(format!(
                "{} amplitudes for dim {}",
                parsed.rows.len(),
                parsed.dim
            )));
        }
        Self::checked_raw(parsed.rows.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Annihilation and creation operators.
pub fn ladder_ops(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let mut a = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = C64::from((n as f64).sqrt());
    }
    let a = FockOperator::from_matrix_unchecked(a);
    let adag = a.dagger();
    Ok((a, adag))
}

/// Number operator `a†a`, built exactly.
pub fn number_op(dim: usize) -> Result<FockOperator> {
    let diag: Vec<C64> = (0..dim).map(|n| C64::from(n as f64)).collect();
    FockOperator::diagonal(&diag)
}

/// Position and momentum operators.
pub fn quadrature_ops(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let mut x = Array2::<C64>::zeros((dim, dim));
    let mut p = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        let e = (n as f64 / 2.0).sqrt();
        x[[n - 1, n]] = C64::from(e);
        x[[n, n - 1]] = C64::from(e);
        p[[n - 1, n]] = C64::new(0.0, -e);
        p[[n, n - 1]] = C64::new(0.0, e);
    }
    Ok((
        FockOperator::from_matrix_unchecked(x),
        FockOperator::from_matrix_unchecked(p),
    ))
}

/// `exp(A)` (Padé scaling and squaring).
pub fn matrix_exp(op: &FockOperator) -> Result<FockOperator> {
    Ok(FockOperator::from_matrix_unchecked(expm::expm(&op.matrix.view())?))
}

/// `D(α,β) = exp(i√2 β x − i√2 α p)` by matrix exponential of the truncated
/// generator.
pub fn displacement(alpha: f64, beta: f64, dim: usize) -> Result<FockOperator> {
    let (x, p) = quadrature_ops(dim)?;
    let gen = &x.matrix * C64::new(0.0, SQRT_2 * beta) - &p.matrix * C64::new(0.0, SQRT_2 * alpha);
    matrix_exp(&FockOperator::from_matrix_unchecked(gen))
}

/// `Π(0,0) = diag((−1)ⁿ)`.
pub fn parity_origin(dim: usize) -> Result<FockOperator> {
    let diag: Vec<C64> = (0..dim)
        .map(|n| C64::from(if n % 2 == 0 { 1.0 } else { -1.0 }))
        .collect();
    FockOperator::diagonal(&diag)
}

/// Displaced parity `Π(α,β) = D(α,β)·Π(0,0)`.
pub fn parity(alpha: f64, beta: f64, dim: usize) -> Result<FockOperator> {
    let mut m = displacement(alpha, beta, dim)?.into_matrix();
    flip_odd_columns(&mut m);
    Ok(FockOperator::from_matrix_unchecked(m))
}

/// Thermal state `(1−s)Σ sⁿ|n⟩⟨n|` truncated to `dim` (not renormalized).
pub fn thermal_state(s: f64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Invalid(format!("thermal ratio {s} must lie in [0, 1)")));
    }
    let diag: Vec<C64> = (0..dim)
        .map(|n| C64::from((1.0 - s) * s.powi(n as i32)))
        .collect();
    FockOperator::diagonal(&diag)
}

/// Right-multiply by `diag((−1)ⁿ)`.
pub(crate) fn flip_odd_columns(m: &mut Array2<C64>) {
    for (j, mut col) in m.columns_mut().into_iter().enumerate() {
        if j % 2 == 1 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// `D(α,β)` from closed-form (Laguerre) matrix elements; agrees with
/// [`displacement`] on the interior block and has no truncation error of
/// its own.
pub fn displacement_exact(alpha: f64, beta: f64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    Ok(FockOperator::from_matrix_unchecked(hermite::displacement_elements(alpha, beta, dim)))
}

/// `Π(α,β)` from closed-form elements.
pub fn parity_exact(alpha: f64, beta: f64, dim: usize) -> Result<FockOperator> {
    let mut m = displacement_exact(alpha, beta, dim)?.into_matrix();
    flip_odd_columns(&mut m);
    Ok(FockOperator::from_matrix_unchecked(m))
}
