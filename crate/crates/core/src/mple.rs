//! Maximum pseudo-likelihood estimation of the inverse temperature.
//!
//! The estimate is the smallest `b >= 0` solving `H(x) = u(b)` with
//! `u(b) = sum_i m_i tanh(p b m_i)`. Since `u` is nondecreasing from 0 to
//! `sum |m_i|`, the solution set is empty (estimate `+inf`) unless
//! `0 <= H < sum |m_i|`.

use crate::error::{Error, Result};
use crate::landscape::g_second;
use crate::spin::SpinConfig;
use crate::stats::z_for_level;
use crate::tensor::InteractionTensor;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_B_MAX: f64 = 1e6;
const BISECT_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MplFlags {
    pub no_finite_root: bool,
    pub zero_at_origin: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MplResult {
    /// In `[0, +inf]`.
    pub beta_hat: f64,
    pub root_bracket: (f64, f64),
    pub iterations: usize,
    /// `|s_X(beta_hat)|`; 0 for the infinite estimate.
    pub residual: f64,
    pub flags: MplFlags,
}

impl MplResult {
    pub fn is_infinite(&self) -> bool {
        self.flags.no_finite_root
    }

    fn infinite(bracket: (f64, f64), iterations: usize, zero_at_origin: bool) -> Self {
        MplResult {
            beta_hat: f64::INFINITY,
            root_bracket: bracket,
            iterations,
            residual: 0.0,
            flags: MplFlags { no_finite_root: true, zero_at_origin, converged: false },
        }
    }

    fn zero(zero_at_origin: bool) -> Self {
        MplResult {
            beta_hat: 0.0,
            root_bracket: (0.0, 0.0),
            iterations: 0,
            residual: 0.0,
            flags: MplFlags { no_finite_root: false, zero_at_origin, converged: true },
        }
    }
}

/// Hamiltonian and local fields in compressed form: `(m, multiplicity)`
/// pairs. A Curie–Weiss configuration collapses to a single pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    pub order: usize,
    pub n: usize,
    pub hamiltonian: f64,
    pub fields: Vec<(f64, f64)>,
    /// `sum |m_i|` over sites with `x_i m_i < 0`. Equals `(sup_u - H) / 2`
    /// exactly, which the difference itself cannot resolve near zero.
    pub misaligned: f64,
}

impl FieldProfile {
    pub fn new(tensor: &InteractionTensor, x: &SpinConfig) -> Result<Self> {
        if tensor.is_curie_weiss() {
            tensor.hamiltonian(x)?;
            return Ok(Self::curie_weiss(tensor.order(), x.n(), x.up_count()));
        }
        let hamiltonian = tensor.hamiltonian(x)?;
        let m = tensor.all_local_fields(x)?;
        let misaligned = m.iter().enumerate().filter(|&(i, v)| v * x.get(i) < 0.0).map(|(_, v)| v.abs()).sum();
        Ok(Self { order: tensor.order(), n: x.n(), hamiltonian, fields: m.into_iter().map(|v| (v, 1.0)).collect(), misaligned })
    }

    /// Profile of a Curie–Weiss configuration with `k` up spins out of `n`.
    pub fn curie_weiss(order: usize, n: usize, k: usize) -> Self {
        let mean = (2.0 * k as f64 - n as f64) / n as f64;
        let field = mean.powi(order as i32 - 1);
        let against = if field > 0.0 { n - k } else if field < 0.0 { k } else { 0 };
        FieldProfile {
            order,
            n,
            hamiltonian: n as f64 * mean.powi(order as i32),
            fields: vec![(field, n as f64)],
            misaligned: against as f64 * field.abs(),
        }
    }

    pub fn u(&self, b: f64) -> f64 {
        let p = self.order as f64;
        self.fields.iter().map(|&(m, c)| c * m * (p * b * m).tanh()).sum()
    }

    pub fn u_prime(&self, b: f64) -> f64 {
        let p = self.order as f64;
        self.fields
            .iter()
            .map(|&(m, c)| {
                let ch = (p * b * m).cosh();
                c * p * m * m / (ch * ch)
            })
            .sum()
    }

    pub fn sup_u(&self) -> f64 {
        self.fields.iter().map(|&(m, c)| c * m.abs()).sum()
    }

    pub fn score(&self, b: f64) -> f64 {
        (self.hamiltonian - self.u(b)) / self.n as f64
    }

    pub fn estimate(&self, tol: f64, b_max: f64) -> MplResult {
        let h = self.hamiltonian;
        let total = self.sup_u();
        let zero_tol = 64.0 * f64::EPSILON * total.max(h.abs());
        if total == 0.0 {
            return if h.abs() <= zero_tol { MplResult::zero(true) } else { MplResult::infinite((0.0, f64::INFINITY), 0, true) };
        }
        if h.abs() <= zero_tol {
            return MplResult::zero(false);
        }
        if h < 0.0 || h >= total || self.misaligned <= zero_tol {
            return MplResult::infinite((0.0, f64::INFINITY), 0, false);
        }
        let mut iterations = 0;
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.u(hi) < h {
            iterations += 1;
            lo = hi;
            hi *= 2.0;
            if hi > b_max {
                return MplResult::infinite((lo, f64::INFINITY), iterations, false);
            }
        }
        while hi - lo > BISECT_WIDTH * hi.max(1.0) {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if self.u(mid) < h {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton polish inside the bracket; stop on a negligible step since
        // tiny fields make u' small and residuals alone misleading
        let mut b = 0.5 * (lo + hi);
        for _ in 0..100 {
            iterations += 1;
            let f = self.u(b) - h;
            if f < 0.0 {
                lo = lo.max(b);
            } else {
                hi = hi.min(b);
            }
            let d = self.u_prime(b);
            let mut next = if d > 0.0 { b - f / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - b).abs();
            b = next;
            if step <= 4.0 * f64::EPSILON * b.max(1e-300) {
                break;
            }
        }
        let residual = self.score(b).abs();
        MplResult {
            beta_hat: b,
            root_bracket: (lo, hi),
            iterations,
            residual,
            flags: MplFlags { no_finite_root: false, zero_at_origin: false, converged: residual <= tol },
        }
    }
}

/// `s_X(b) = (H(x) - sum_i m_i tanh(p b m_i)) / N`.
pub fn pseudolik_score(tensor: &InteractionTensor, x: &SpinConfig, b: f64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(Error::InvalidArgument(format!("b = {b} must be nonnegative")));
    }
    Ok(FieldProfile::new(tensor, x)?.score(b))
}

pub fn mple(tensor: &InteractionTensor, x: &SpinConfig) -> Result<MplResult> {
    mple_with(tensor, x, DEFAULT_TOL, DEFAULT_B_MAX)
}

pub fn mple_with(tensor: &InteractionTensor, x: &SpinConfig, tol: f64, b_max: f64) -> Result<MplResult> {
    if !(tol > 0.0) || !(b_max > 0.0) {
        return Err(Error::InvalidArgument("tol and b_max must be positive".into()));
    }
    Ok(FieldProfile::new(tensor, x)?.estimate(tol, b_max))
}

/// Closed-form Curie–Weiss estimate as a function of the mean spin.
pub fn phi_p(t: f64, p: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t = {t} outside [-1, 1]")));
    }
    if p < 2 {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 2")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if p % 2 == 1 && t < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(t.atanh() / (p as f64 * t.powi(p as i32 - 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    CurieWeissClt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub method: CiMethod,
    pub center: f64,
    pub half_width: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, beta: f64) -> bool {
        self.lo <= beta && beta <= self.hi
    }
}

/// Plug-in CLT interval for Curie–Weiss samples with `beta_hat` inside `g''`.
pub fn cw_confidence_interval(xbar: f64, p: usize, n: usize, level: f64) -> Result<ConfidenceInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level {level} outside (0, 1)")));
    }
    let a = xbar.abs();
    if !(a < 1.0) {
        return Err(Error::IntervalUndefined(format!("|mean spin| = {a} is not below 1")));
    }
    if a < 1e-6 {
        return Err(Error::IntervalUndefined(format!("|mean spin| = {a} too close to 0")));
    }
    let center = phi_p(xbar, p)?;
    if center.is_infinite() {
        return Err(Error::IntervalUndefined("estimate is infinite (odd p, negative mean spin)".into()));
    }
    let g2 = g_second(center, p, a)?;
    if g2 >= 0.0 {
        return Err(Error::IntervalUndefined(format!("g''(|mean spin|) = {g2} >= 0: sample looks below threshold")));
    }
    let half_width = a.powi(1 - p as i32) / p as f64 * (-g2 / n as f64).sqrt() * z_for_level(level);
    Ok(ConfidenceInterval {
        lo: center - half_width,
        hi: center + half_width,
        level,
        method: CiMethod::CurieWeissClt,
        center,
        half_width,
    })
}
