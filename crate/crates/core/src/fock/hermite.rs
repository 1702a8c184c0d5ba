//! Hermite functions, the spectral basis of the truncated position operator,
//! and closed-form displacement matrix elements.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Normalized Hermite functions ψ₀(x)…ψ_{count−1}(x).
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-x * x / 2.0).exp());
    if count > 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Eigen-decomposition of the truncated position operator x̂ in a basis of
/// `dim` number states.
///
/// The eigenvalues are the Gauss–Hermite nodes of order `dim` and the
/// eigenvectors are Hermite-polynomial values at those nodes, so any
/// function of x̂ (or of a rotated quadrature) is a diagonal scaling in
/// this basis.
#[derive(Debug)]
pub struct HermiteBasis {
    nodes: Vec<f64>,
    /// Column k is the unit eigenvector for `nodes[k]`.
    vectors: Array2<f64>,
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<HermiteBasis>>>> = OnceLock::new();

impl HermiteBasis {
    /// Shared, cached basis for `dim`.
    pub fn get(dim: usize) -> Arc<HermiteBasis> {
        let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().expect("basis cache poisoned").get(&dim) {
            return Arc::clone(b);
        }
        let built = Arc::new(HermiteBasis::build(dim));
        cache
            .lock()
            .expect("basis cache poisoned")
            .entry(dim)
            .or_insert(built)
            .clone()
    }

    fn build(dim: usize) -> Self {
        assert!(dim >= 1, "basis dimension must be positive");
        let off: Vec<f64> = (1..dim).map(|n| (n as f64 / 2.0).sqrt()).collect();
        let mut nodes = tridiagonal_eigenvalues(&vec![0.0; dim], &off);
        nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
        for node in nodes.iter_mut() {
            *node = polish_node(*node, dim);
        }
        let mut vectors = Array2::<f64>::zeros((dim, dim));
        for (k, &xi) in nodes.iter().enumerate() {
            let v = eigenvector(xi, dim);
            for (n, val) in v.into_iter().enumerate() {
                vectors[[n, k]] = val;
            }
        }
        Self { nodes, vectors }
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }
}

/// Orthonormal Hermite polynomial recurrence p_{n+1} = (√2 x p_n − √n p_{n−1})/√(n+1),
/// rescaled on the fly; returns the (unnormalized) vector p_0..p_{dim−1}
/// together with the scaled p_dim.
fn polynomial_run(x: f64, dim: usize) -> (Vec<f64>, f64) {
    let mut p = Vec::with_capacity(dim);
    p.push(1.0f64);
    let mut prev = 0.0f64;
    for n in 0..dim {
        let nf = n as f64;
        let next = (2f64.sqrt() * x * p[n] - nf.sqrt() * prev) / (nf + 1.0).sqrt();
        if n + 1 == dim {
            return (p, next);
        }
        prev = p[n];
        p.push(next);
        if next.abs() > 1e150 {
            for v in p.iter_mut() {
                *v *= 1e-150;
            }
            prev *= 1e-150;
        }
    }
    unreachable!("loop returns on the last index")
}

fn polish_node(x: f64, dim: usize) -> f64 {
    let mut x = x;
    for _ in 0..3 {
        let (p, last) = polynomial_run(x, dim);
        let deriv = (2.0 * dim as f64).sqrt() * p[dim - 1];
        if deriv == 0.0 {
            break;
        }
        let dx = last / deriv;
        if !dx.is_finite() {
            break;
        }
        x -= dx;
        if dx.abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

fn eigenvector(x: f64, dim: usize) -> Vec<f64> {
    let (mut p, _) = polynomial_run(x, dim);
    let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in p.iter_mut() {
        *v /= norm;
    }
    p
}

/// Eigenvalues of a real symmetric tridiagonal matrix (implicit QL).
fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Closed-form matrix elements ⟨m|D(α,β)|n⟩, m,n < `size`, from the
/// associated-Laguerre formula with λ = α + iβ:
///
/// ```text
/// ⟨m|D|n⟩ = √(n!/m!) λ^{m−n} e^{−|λ|²/2} L_n^{(m−n)}(|λ|²)        (m ≥ n)
/// ⟨m|D|n⟩ = √(m!/n!) (−λ*)^{n−m} e^{−|λ|²/2} L_m^{(n−m)}(|λ|²)    (m < n)
/// ```
///
/// Independent of any matrix exponential; serves as the reference for
/// quadrature oracles.
pub fn displacement_elements(alpha: f64, beta: f64, size: usize) -> Array2<C64> {
    let mut out = Array2::<C64>::zeros((size, size));
    displacement_elements_into(alpha, beta, &mut out);
    out
}

/// [`displacement_elements`] writing into a preallocated square matrix.
pub fn displacement_elements_into(alpha: f64, beta: f64, out: &mut Array2<C64>) {
    let size = out.nrows();
    let lam = C64::new(alpha, beta);
    let r2 = lam.norm_sqr();
    let gauss = (-r2 / 2.0).exp();
    let ratio = -lam.conj() / lam;
    // c_k = λ^k / √(k!) e^{−|λ|²/2}
    let mut ck = C64::from(gauss);
    let mut lag = vec![0.0f64; size];
    for k in 0..size {
        if k > 0 {
            ck = ck * lam / (k as f64).sqrt();
        }
        let kf = k as f64;
        let len = size - k;
        lag[0] = 1.0;
        if len > 1 {
            lag[1] = 1.0 + kf - r2;
        }
        for j in 1..len.saturating_sub(1) {
            let jf = j as f64;
            lag[j + 1] = ((2.0 * jf + 1.0 + kf - r2) * lag[j] - (jf + kf) * lag[j - 1]) / (jf + 1.0);
        }
        // (−λ*)^k = λ^k · (−λ*/λ)^k, a pure phase times the same modulus
        let mirror = if k == 0 || r2 == 0.0 { C64::from(1.0) } else { ratio.powu(k as u32) };
        // √(j! k! / (j+k)!) = 1/√binom(j+k, j)
        let mut binom = 1.0f64;
        for j in 0..len {
            if j > 0 {
                binom *= (j + k) as f64 / j as f64;
            }
            let v = ck * (lag[j] / binom.sqrt());
            out[[j + k, j]] = v;
            if k > 0 {
                out[[j, j + k]] = v * mirror;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let h = 0.01;
        let xs: Vec<f64> = (-1200..=1200).map(|k| k as f64 * h).collect();
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, 6)).collect();
        for m in 0..6 {
            for n in 0..6 {
                let s: f64 = table.iter().map(|v| v[m] * v[n]).sum::<f64>() * h;
                assert_abs_diff_eq!(s, if m == n { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn nodes_match_small_hermite_roots() {
        // H_2 roots ±1/√2, H_3 roots 0, ±√(3/2)
        let b2 = HermiteBasis::get(2);
        assert_abs_diff_eq!(b2.nodes()[1], 0.5f64.sqrt(), epsilon = 1e-14);
        let b3 = HermiteBasis::get(3);
        assert_abs_diff_eq!(b3.nodes()[0], -(1.5f64.sqrt()), epsilon = 1e-14);
        assert_abs_diff_eq!(b3.nodes()[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn basis_diagonalizes_truncated_position() {
        let dim = 300;
        let b = HermiteBasis::get(dim);
        let v = b.vectors();
        // x v_k = ξ_k v_k, checked row by row with the tridiagonal x̂
        let mut worst = 0.0f64;
        for k in (0..dim).step_by(7) {
            for n in 0..dim {
                let mut xv = 0.0;
                if n > 0 {
                    xv += (n as f64 / 2.0).sqrt() * v[[n - 1, k]];
                }
                if n + 1 < dim {
                    xv += ((n + 1) as f64 / 2.0).sqrt() * v[[n + 1, k]];
                }
                worst = worst.max((xv - b.nodes()[k] * v[[n, k]]).abs());
            }
        }
        assert!(worst < 1e-11, "eigen residual {worst}");
        // orthogonality of a few columns
        let dot = (0..dim).map(|n| v[[n, 3]] * v[[n, 150]]).sum::<f64>();
        assert_abs_diff_eq!(dot, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn displacement_vacuum_column() {
        let d = displacement_elements(1.0, 0.0, 6);
        assert_abs_diff_eq!(d[[0, 0]].re, (-0.5f64).exp(), epsilon = 1e-15);
        // ⟨1|D|1⟩ = (1 − |λ|²) e^{−|λ|²/2}
        let d = displacement_elements(0.3, 0.4, 4);
        assert_abs_diff_eq!(d[[1, 1]].re, (1.0 - 0.25) * (-0.125f64).exp(), epsilon = 1e-15);
    }
}
