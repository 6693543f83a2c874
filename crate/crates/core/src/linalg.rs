//! Dense symmetric matrices and a Lanczos spectral-norm routine.

use crate::error::{Error, Result};

/// Row-major dense `n x n` matrix, used for local interaction and co-degree
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// `max_i sum_j |a_ij|`, an upper bound on the spectral norm.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let mut tmp = vec![0.0; self.n];
        self.matvec(u, &mut tmp);
        dot(u, &tmp)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn seed_vector(n: usize, state: &mut u64) -> Vec<f64> {
    (0..n).map(|_| (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0).collect()
}

const MAX_KRYLOV: usize = 200;
const MAX_RESTARTS: usize = 60;

/// Smallest and largest eigenvalue of a symmetric matrix.
///
/// Lanczos with full reorthogonalisation from a fixed pseudo-random start
/// vector, restarted from the extreme Ritz vectors when the Krylov space is
/// smaller than `n`. Extreme eigenvalues of the tridiagonal projection come
/// from Sturm-sequence bisection.
pub fn extreme_eigenvalues(a: &SymMatrix) -> Result<(f64, f64)> {
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let n = a.n();
    if n == 0 {
        return Ok((0.0, 0.0));
    }
    let scale = a.max_abs_row_sum();
    if scale == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut rng_state = 0x0005_EED0_F1A4_C205_u64;
    let mut start = seed_vector(n, &mut rng_state);
    let m = n.min(MAX_KRYLOV);
    let mut last = (0.0, 0.0);
    for _ in 0..MAX_RESTARTS {
        let run = lanczos(a, &start, m, scale, &mut rng_state);
        let lo = tridiag_extreme(&run.alpha, &run.beta, false);
        let hi = tridiag_extreme(&run.alpha, &run.beta, true);
        last = (lo, hi);
        if run.basis.len() == n {
            return Ok(last);
        }
        let y_lo = tridiag_eigvec(&run.alpha, &run.beta, lo);
        let y_hi = tridiag_eigvec(&run.alpha, &run.beta, hi);
        let tol = 1e-11 * scale;
        let res_lo = (run.next_beta * y_lo.last().copied().unwrap_or(0.0)).abs();
        let res_hi = (run.next_beta * y_hi.last().copied().unwrap_or(0.0)).abs();
        if res_lo <= tol && res_hi <= tol {
            return Ok(last);
        }
        let mut next = vec![0.0; n];
        for (k, q) in run.basis.iter().enumerate() {
            let c = y_lo[k] + y_hi[k];
            for (v, qi) in next.iter_mut().zip(q) {
                *v += c * qi;
            }
        }
        if norm(&next) < 1e-300 {
            next = seed_vector(n, &mut rng_state);
        }
        start = next;
    }
    Ok(last)
}

/// Spectral norm `max |lambda|` of a symmetric matrix.
pub fn operator_norm(a: &SymMatrix) -> Result<f64> {
    let (lo, hi) = extreme_eigenvalues(a)?;
    Ok(lo.abs().max(hi.abs()))
}

struct LanczosRun {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    next_beta: f64,
    basis: Vec<Vec<f64>>,
}

fn lanczos(a: &SymMatrix, start: &[f64], m: usize, scale: f64, rng_state: &mut u64) -> LanczosRun {
    let n = a.n();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let s = norm(start);
    let mut q: Vec<f64> = start.iter().map(|v| v / s).collect();
    let mut w = vec![0.0; n];
    let next_beta;
    loop {
        a.matvec(&q, &mut w);
        let al = dot(&q, &w);
        basis.push(q);
        alpha.push(al);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let mut bt = norm(&w);
        if basis.len() == m || basis.len() == n {
            next_beta = bt;
            break;
        }
        if bt <= 1e-12 * scale {
            // invariant subspace found; continue with a fresh orthogonal direction
            let mut fresh = seed_vector(n, rng_state);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &fresh);
                    for (fi, bi) in fresh.iter_mut().zip(b) {
                        *fi -= c * bi;
                    }
                }
            }
            let fnorm = norm(&fresh);
            if fnorm < 1e-12 {
                next_beta = 0.0;
                break;
            }
            w = fresh.iter().map(|v| v / fnorm).collect();
            bt = 0.0;
            beta.push(bt);
            q = std::mem::replace(&mut w, vec![0.0; n]);
            continue;
        }
        beta.push(bt);
        q = w.iter().map(|v| v / bt).collect();
    }
    LanczosRun { alpha, beta, next_beta, basis }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for k in 0..alpha.len() {
        let off = if k == 0 { 0.0 } else { beta[k - 1] * beta[k - 1] };
        d = alpha[k] - x - if k == 0 { 0.0 } else { off / d };
        if d == 0.0 {
            d = -f64::EPSILON * (alpha[k].abs() + x.abs() + 1e-300);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiag_extreme(alpha: &[f64], beta: &[f64], largest: bool) -> f64 {
    let k = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let target = if largest { k - 1 } else { 0 };
    // find x with exactly `target` eigenvalues below x and one at x
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if sturm_count(alpha, beta, mid) > target {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

fn tridiag_eigvec(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let k = alpha.len();
    let scale = alpha.iter().chain(beta).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let shift = theta + 1e-10 * scale;
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        y = solve_tridiag(alpha, beta, shift, &y);
        let s = norm(&y);
        if !(s.is_finite() && s > 0.0) {
            return vec![0.0; k];
        }
        y.iter_mut().for_each(|v| *v /= s);
    }
    y
}

/// Solves `(T - shift I) y = rhs` by Gaussian elimination with partial
/// pivoting on the tridiagonal band.
fn solve_tridiag(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let k = alpha.len();
    // rows hold [diag, super, super2] after pivoting
    let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut up: Vec<f64> = (0..k).map(|i| if i + 1 < k { beta[i] } else { 0.0 }).collect();
    let mut up2 = vec![0.0; k];
    let mut lo: Vec<f64> = (0..k).map(|i| if i + 1 < k { beta[i] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    for i in 0..k.saturating_sub(1) {
        if lo[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let (di, ui, u2i, bi) = (d[i], up[i], up2[i], b[i]);
            d[i] = lo[i];
            up[i] = d[i + 1];
            up2[i] = up[i + 1];
            b[i] = b[i + 1];
            lo[i] = di;
            d[i + 1] = ui;
            up[i + 1] = u2i;
            b[i + 1] = bi;
        }
        let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
        let f = lo[i] / piv;
        d[i + 1] -= f * up[i];
        up[i + 1] -= f * up2[i];
        b[i + 1] -= f * b[i];
    }
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        if i + 1 < k {
            s -= up[i] * y[i + 1];
        }
        if i + 2 < k {
            s -= up2[i] * y[i + 2];
        }
        let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
        y[i] = s / piv;
    }
    y
}
