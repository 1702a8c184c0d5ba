//! Dense complex matrix exponential: Padé approximants of degree 3–13 with
//! scaling and squaring, degree chosen from the 1-norm.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest 1-norm accepted. Beyond this the squaring phase needs more than
/// ~15 steps and the entries of a non-normal input can overflow.
pub const MAX_NORM: f64 = 1.0e5;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

pub fn one_norm(a: &ArrayView2<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square complex matrix.
pub fn expm(a: &ArrayView2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Invalid(format!("expm of a {}x{} matrix", n, a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    let norm = one_norm(a);
    if norm > MAX_NORM {
        return Err(Error::Overflow { norm });
    }
    let ident = Array2::<C64>::eye(n);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(a, coeffs, &ident);
            return finish(solve_pade(&u, &v)?, 0, norm);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|v| v * 2f64.powi(-s));
    let (u, v) = pade13(&scaled.view(), &ident);
    finish(solve_pade(&u, &v)?, s, norm)
}

fn finish(mut x: Array2<C64>, squarings: i32, norm: f64) -> Result<Array2<C64>> {
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(x)
}

fn scaled_sum(terms: &[(f64, &Array2<C64>)]) -> Array2<C64> {
    let mut out = terms[0].1.mapv(|v| v * terms[0].0);
    for &(c, m) in &terms[1..] {
        out.scaled_add(C64::from(c), m);
    }
    out
}

fn pade_low(a: &ArrayView2<C64>, b: &[f64], ident: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let m = b.len() - 1;
    let a2 = a.dot(a);
    // powers A^0, A^2, A^4, ...
    let mut powers = vec![ident.clone(), a2.clone()];
    while 2 * (powers.len() - 1) < m - 1 {
        let next = powers.last().expect("non-empty").dot(&a2);
        powers.push(next);
    }
    let mut odd = Array2::<C64>::zeros(a.raw_dim());
    let mut even = Array2::<C64>::zeros(a.raw_dim());
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 <= m {
            odd.scaled_add(C64::from(b[2 * k + 1]), p);
        }
        if 2 * k <= m {
            even.scaled_add(C64::from(b[2 * k]), p);
        }
    }
    (a.dot(&odd), even)
}

fn pade13(a: &ArrayView2<C64>, ident: &Array2<C64>) -> (Array2<C64>, Array2<C64>) {
    let b = &B13;
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let inner_u = scaled_sum(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let mut u = a6.dot(&inner_u);
    u = u + scaled_sum(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], ident)]);
    let u = a.dot(&u);
    let inner_v = scaled_sum(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v = a6.dot(&inner_v) + scaled_sum(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], ident)]);
    (u, v)
}

/// Solve `(V − U) X = V + U`.
fn solve_pade(u: &Array2<C64>, v: &Array2<C64>) -> Result<Array2<C64>> {
    let lhs = v - u;
    let rhs = v + u;
    lu_solve(lhs, rhs)
}

/// Solve `A X = B` by LU decomposition with partial pivoting.
pub fn lu_solve(mut a: Array2<C64>, mut b: Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, a[[i, k]].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 || !pmax.is_finite() {
            return Err(Error::Invalid("singular matrix in linear solve".into()));
        }
        if piv != k {
            for j in 0..n {
                a.swap([k, j], [piv, j]);
            }
            for j in 0..b.ncols() {
                b.swap([k, j], [piv, j]);
            }
        }
        let pivot = a[[k, k]];
        for i in (k + 1)..n {
            let f = a[[i, k]] / pivot;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            a[[i, k]] = f;
            for j in (k + 1)..n {
                let t = a[[k, j]];
                a[[i, j]] -= f * t;
            }
            for j in 0..b.ncols() {
                let t = b[[k, j]];
                b[[i, j]] -= f * t;
            }
        }
    }
    for j in 0..b.ncols() {
        for i in (0..n).rev() {
            let mut s = b[[i, j]];
            for k in (i + 1)..n {
                s -= a[[i, k]] * b[[k, j]];
            }
            b[[i, j]] = s / a[[i, i]];
        }
    }
    Ok(b)
}
