//! Mean-field free-energy landscapes and estimability thresholds.
//!
//! Points close to 1 are carried as a pair `(t, 1 - t)` so that the entropy
//! and `atanh` keep full relative precision in the gap; for large `p` the
//! positive maximiser sits within `1e-12` of 1.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{extreme_eigenvalues, SymMatrix};
use crate::models::{validate_proportions, BlockTensor};
use crate::quadrature::integrate;

const LN2: f64 = std::f64::consts::LN_2;
/// `g(m) >= -TIE` still counts as a global maximiser (threshold ties).
const TIE: f64 = 1e-12;
/// Internal bisection width for the Curie–Weiss threshold.
const CW_BETA_TOL: f64 = 1e-12;

/// A point of `[0, 1]` with its gap to 1 stored separately.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Pt {
    t: f64,
    s: f64,
}

impl Pt {
    fn from_t(t: f64) -> Self {
        Pt { t, s: 1.0 - t }
    }
    fn from_s(s: f64) -> Self {
        Pt { t: 1.0 - s, s }
    }
    fn mid(a: Pt, b: Pt) -> Pt {
        if a.s < 0.25 && b.s < 0.25 {
            Pt::from_s(0.5 * (a.s + b.s))
        } else {
            Pt::from_t(0.5 * (a.t + b.t))
        }
    }
}

fn entropy_pt(x: Pt) -> f64 {
    let t = x.t;
    if t < 0.01 {
        let t2 = t * t;
        // I(t) = sum_k t^{2k} / (2k (2k-1))
        return t2 * (0.5 + t2 * (1.0 / 12.0 + t2 * (1.0 / 30.0 + t2 * (1.0 / 56.0 + t2 / 90.0))));
    }
    if x.s <= 0.0 {
        return LN2;
    }
    let a = (1.0 + t) * (2.0 - x.s).ln();
    let b = if t < 0.5 { (1.0 - t) * (-t).ln_1p() } else { x.s * x.s.ln() };
    0.5 * (a + b)
}

fn atanh_pt(x: Pt) -> f64 {
    if x.t < 0.5 {
        x.t.atanh()
    } else if x.s <= 0.0 {
        f64::INFINITY
    } else {
        0.5 * ((2.0 - x.s).ln() - x.s.ln())
    }
}

/// `1 - t^2` evaluated from the gap.
fn one_minus_sq(x: Pt) -> f64 {
    if x.t < 0.5 {
        (1.0 - x.t) * (1.0 + x.t)
    } else {
        x.s * (2.0 - x.s)
    }
}

/// Binary entropy `I(t) = ((1+t) ln(1+t) + (1-t) ln(1-t)) / 2`, with
/// `I(±1) = ln 2`.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("entropy argument {t} outside [-1, 1]")));
    }
    Ok(entropy_pt(Pt::from_t(t.abs())))
}

fn check_t(t: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t = {t} outside [-1, 1]")))
    }
}

/// `g(t) = beta t^p - I(t)`.
pub fn g_value(beta: f64, p: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(beta * t.powi(p as i32) - binary_entropy(t)?)
}

/// `g'(t) = beta p t^{p-1} - atanh(t)`.
pub fn g_first(beta: f64, p: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(beta * p as f64 * t.powi(p as i32 - 1) - t.atanh())
}

/// `g''(t) = beta p (p-1) t^{p-2} - 1 / (1 - t^2)`.
pub fn g_second(beta: f64, p: usize, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(beta * (p * (p - 1)) as f64 * t.powi(p as i32 - 2) - 1.0 / ((1.0 - t) * (1.0 + t)))
}

fn g_pt(beta: f64, p: usize, x: Pt) -> f64 {
    beta * x.t.powi(p as i32) - entropy_pt(x)
}

fn g1_pt(beta: f64, p: usize, x: Pt) -> f64 {
    beta * p as f64 * x.t.powi(p as i32 - 1) - atanh_pt(x)
}

fn g2_pt(beta: f64, p: usize, x: Pt) -> f64 {
    beta * (p * (p - 1)) as f64 * x.t.powi(p as i32 - 2) - 1.0 / one_minus_sq(x)
}

/// Scan points for `g'` on `(0, 1)`: geometric towards 0, a uniform `1e-4`
/// grid, then geometric in the gap down to `1e-17`.
fn scan_grid() -> &'static [Pt] {
    static GRID: std::sync::OnceLock<Vec<Pt>> = std::sync::OnceLock::new();
    GRID.get_or_init(|| {
        let mut pts = Vec::new();
        let mut t = 1e-12;
        while t < 1e-4 {
            pts.push(Pt::from_t(t));
            t *= 1.05;
        }
        for k in 1..10_000 {
            pts.push(Pt { t: k as f64 * 1e-4, s: (10_000 - k) as f64 * 1e-4 });
        }
        let mut s: f64 = 1e-4 / 1.05;
        while s > 1e-17 {
            pts.push(Pt::from_s(s));
            s /= 1.05;
        }
        pts
    })
}

#[derive(Debug, Clone, Copy)]
struct Stationary {
    x: Pt,
    g: f64,
    g2: f64,
}

/// Refines a sign change of `g'` between `a` (g' > 0) and `b` (g' < 0).
fn refine_max(beta: f64, p: usize, mut a: Pt, mut b: Pt) -> Pt {
    for _ in 0..400 {
        let m = Pt::mid(a, b);
        if m == a || m == b {
            break;
        }
        if g1_pt(beta, p, m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let (fa, fb) = (g1_pt(beta, p, a).abs(), g1_pt(beta, p, b).abs());
    let best = if fa <= fb { a } else { b };
    // one guarded Newton step
    let step = g1_pt(beta, p, best) / g2_pt(beta, p, best);
    let cand = if best.s < 0.25 { Pt::from_s(best.s + step) } else { Pt::from_t(best.t - step) };
    let (lo, hi) = if a.t <= b.t { (a.t, b.t) } else { (b.t, a.t) };
    if cand.t >= lo && cand.t <= hi && cand.s > 0.0 && g1_pt(beta, p, cand).abs() < g1_pt(beta, p, best).abs() {
        cand
    } else {
        best
    }
}

/// Positive local maxima of `g` on `(0, 1)`.
fn positive_local_maxima(beta: f64, p: usize) -> Vec<Stationary> {
    let grid = scan_grid();
    let mut out = Vec::new();
    let mut prev = grid[0];
    let mut fprev = g1_pt(beta, p, prev);
    for &x in &grid[1..] {
        let f = g1_pt(beta, p, x);
        if fprev > 0.0 && f <= 0.0 {
            let r = refine_max(beta, p, prev, x);
            out.push(Stationary { x: r, g: g_pt(beta, p, r), g2: g2_pt(beta, p, r) });
        }
        prev = x;
        fprev = f;
    }
    out
}

fn best_positive_max(beta: f64, p: usize) -> Option<Stationary> {
    positive_local_maxima(beta, p).into_iter().max_by(|a, b| a.g.total_cmp(&b.g))
}

/// `g` on `[-1, 1]` at fixed `(beta, p)` with its global maximisers.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyCurve {
    pub beta: f64,
    pub p: usize,
    /// Global maximisers `(t, g(t))`, in increasing `t`.
    pub maximizers: Vec<(f64, f64)>,
    pub m_star: Option<f64>,
    /// `1 - m*`, carried at full precision.
    pub m_star_gap: Option<f64>,
    pub g2_at_mstar: Option<f64>,
}

impl FreeEnergyCurve {
    pub fn new(beta: f64, p: usize) -> Result<Self> {
        check_beta_p(beta, p)?;
        let best = best_positive_max(beta, p).filter(|s| s.g >= -TIE);
        let mut maximizers = Vec::new();
        match best {
            Some(s) => {
                if p.is_multiple_of(2) {
                    maximizers.push((-s.x.t, s.g));
                }
                if s.g <= TIE {
                    maximizers.push((0.0, 0.0));
                }
                maximizers.push((s.x.t, s.g));
            }
            None => maximizers.push((0.0, 0.0)),
        }
        Ok(Self {
            beta,
            p,
            maximizers,
            m_star: best.map(|s| s.x.t),
            m_star_gap: best.map(|s| s.x.s),
            g2_at_mstar: best.map(|s| s.g2),
        })
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        g_value(self.beta, self.p, t)
    }

    pub fn sup(&self) -> f64 {
        self.maximizers.iter().map(|m| m.1).fold(0.0, f64::max)
    }
}

fn check_beta_p(beta: f64, p: usize) -> Result<()> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("p = {p} must be at least 2")));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be finite and nonnegative")));
    }
    Ok(())
}

/// Positive global maximiser of `g`, or `None` when 0 is the unique maximiser.
pub fn m_star(beta: f64, p: usize) -> Result<Option<f64>> {
    Ok(FreeEnergyCurve::new(beta, p)?.m_star)
}

/// `sup_t g(t)`, which is 0 below the threshold.
pub fn sup_g(beta: f64, p: usize) -> Result<f64> {
    check_beta_p(beta, p)?;
    Ok(best_positive_max(beta, p).map_or(0.0, |s| s.g.max(0.0)))
}

fn cw_supercritical(beta: f64, p: usize) -> bool {
    // for p = 2 the supremum turns positive through the curvature at 0
    if p == 2 && g2_pt(beta, 2, Pt::from_t(0.0)) > 0.0 {
        return true;
    }
    best_positive_max(beta, p).is_some_and(|s| s.g > 0.0)
}

/// Curie–Weiss threshold `sup{beta : sup_t g = 0}`.
pub fn beta_star_cw(p: usize) -> Result<f64> {
    beta_star_cw_with_tol(p, CW_BETA_TOL)
}

pub fn beta_star_cw_with_tol(p: usize, tol: f64) -> Result<f64> {
    check_beta_p(0.0, p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    // beta t^p > I(t) at t = 1 once beta > ln 2, so the threshold is below 1
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cw_supercritical(mid, p) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Erdős–Rényi threshold, exactly `beta_star_cw(p) / theta`.
pub fn beta_star_er(p: usize, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta = {theta} outside (0, 1]")));
    }
    Ok(beta_star_cw(p)? / theta)
}

/// Limiting quantities at `beta = beta_star_cw(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPoint {
    pub p: usize,
    pub beta_star: f64,
    pub m_star: f64,
    pub m_star_gap: f64,
    pub g2: f64,
    /// `(m*^2 - 1) g''(m*)`.
    pub radicand: f64,
    pub alpha: f64,
    /// Variance of the Gaussian branch at the threshold.
    pub variance: f64,
}

pub fn threshold_point(p: usize) -> Result<ThresholdPoint> {
    if p < 3 {
        return Err(Error::InvalidArgument("the mixture weight needs p >= 3".into()));
    }
    let beta = beta_star_cw(p)?;
    let s = best_positive_max(beta, p).ok_or_else(|| Error::Numerical(format!("no positive maximiser at threshold, p = {p}")))?;
    // (m^2 - 1) g'' = 1 - (1 - m^2) beta p (p-1) m^{p-2}
    let radicand = 1.0 - one_minus_sq(s.x) * beta * (p * (p - 1)) as f64 * s.x.t.powi(p as i32 - 2);
    if !(radicand > 0.0) {
        return Err(Error::Numerical(format!("nonpositive radicand {radicand} at p = {p}")));
    }
    let c = if p.is_multiple_of(2) { 2.0 } else { 1.0 };
    let alpha = 1.0 / (1.0 + c / radicand.sqrt());
    Ok(ThresholdPoint {
        p,
        beta_star: beta,
        m_star: s.x.t,
        m_star_gap: s.x.s,
        g2: s.g2,
        radicand,
        alpha,
        variance: clt_variance(p, s.x.t, s.g2),
    })
}

/// Mass of the divergent branch of the estimate at the threshold.
pub fn alpha_weight(p: usize) -> Result<f64> {
    Ok(threshold_point(p)?.alpha)
}

fn clt_variance(p: usize, m: f64, g2: f64) -> f64 {
    -g2 / ((p * p) as f64 * m.powi(2 * p as i32 - 2))
}

/// Limiting variance of `sqrt(N) (beta_hat - beta)` above the threshold.
pub fn asymptotic_variance(beta: f64, p: usize) -> Result<f64> {
    let curve = FreeEnergyCurve::new(beta, p)?;
    let bstar = beta_star_cw(p)?;
    match (curve.m_star, curve.g2_at_mstar) {
        (Some(m), Some(g2)) if beta > bstar => Ok(clt_variance(p, m, g2)),
        _ => Err(Error::InvalidArgument(format!("beta = {beta} is not above the threshold {bstar} for p = {p}"))),
    }
}

/// Limiting scaled Fisher information `-p^2 m*^{2p-2} / g''(m*)`.
pub fn fisher_info_limit(beta: f64, p: usize) -> Result<f64> {
    Ok(1.0 / asymptotic_variance(beta, p)?)
}

/// Limiting CDF of `sqrt(N) (beta_hat - 1/2)` at `p = 2, beta = 1/2`:
/// `F(sqrt(6t)) - F(-sqrt(6t))` with `dF ∝ exp(-s^4/12) ds`.
pub fn threshold_limit_cdf_p2(t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let upper = (6.0 * t).sqrt().min(12.0);
    let z = 2.0 * 12f64.powf(0.25) * statrs::function::gamma::gamma(1.25);
    let mass = integrate(|s: f64| (-s.powi(4) / 12.0).exp(), 0.0, upper, 1e-13);
    (2.0 * mass / z).min(1.0)
}

/// Polynomial part of a block functional `phi_beta(t) = beta P(t) - sum_j lambda_j I(t_j)`.
#[derive(Debug, Clone)]
enum BlockPoly {
    /// `sum over ordered label tuples Theta[j] prod_l lambda_{j_l} t_{j_l}`.
    Dense(BlockTensor),
    /// `theta prod_j lambda_j t_j` over exactly `p` parts.
    Product(f64),
}

/// Mean-field block functional on `[0, 1]^K`.
#[derive(Debug, Clone)]
pub struct BlockFunctional {
    lambda: Vec<f64>,
    poly: BlockPoly,
}

/// Largest number of blocks accepted by the threshold solvers.
pub const MAX_BLOCKS: usize = 6;

impl BlockFunctional {
    pub fn hsbm(lambda: &[f64], theta: &BlockTensor) -> Result<Self> {
        validate_proportions(lambda)?;
        if lambda.len() > MAX_BLOCKS {
            return Err(Error::InvalidArgument(format!("K = {} exceeds {MAX_BLOCKS}; coarsen the blocks", lambda.len())));
        }
        if theta.k() != lambda.len() {
            return Err(Error::InvalidArgument("block tensor and proportions disagree on K".into()));
        }
        if theta.values().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidArgument("negative block probabilities are not supported".into()));
        }
        Ok(Self { lambda: lambda.to_vec(), poly: BlockPoly::Dense(theta.clone()) })
    }

    pub fn partite(lambda: &[f64], theta: f64) -> Result<Self> {
        validate_proportions(lambda)?;
        if lambda.len() < 2 || lambda.len() > MAX_BLOCKS {
            return Err(Error::InvalidArgument(format!("p-partite functional needs 2..={MAX_BLOCKS} parts")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside (0, 1]")));
        }
        Ok(Self { lambda: lambda.to_vec(), poly: BlockPoly::Product(theta) })
    }

    pub fn k(&self) -> usize {
        self.lambda.len()
    }

    /// Polynomial value, gradient and Hessian at `t`.
    fn poly_derivs(&self, t: &[f64]) -> (f64, Vec<f64>, SymMatrix) {
        let k = self.k();
        match &self.poly {
            BlockPoly::Product(theta) => {
                let u: Vec<f64> = self.lambda.iter().zip(t).map(|(l, x)| l * x).collect();
                let prod_except = |skip: &[usize]| -> f64 {
                    (0..k).filter(|j| !skip.contains(j)).map(|j| u[j]).product::<f64>()
                };
                let value = theta * prod_except(&[]);
                let grad = (0..k).map(|j| theta * self.lambda[j] * prod_except(&[j])).collect();
                let hess = SymMatrix::from_fn(k, |a, b| {
                    if a == b {
                        0.0
                    } else {
                        theta * self.lambda[a] * self.lambda[b] * prod_except(&[a, b])
                    }
                });
                (value, grad, hess)
            }
            BlockPoly::Dense(th) => {
                let p = th.order();
                let u: Vec<f64> = self.lambda.iter().zip(t).map(|(l, x)| l * x).collect();
                // contract trailing indices against u down to order 2
                let mut cur = th.values().to_vec();
                let mut order = p;
                while order > 2 {
                    cur = cur.chunks(k).map(|row| row.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
                    order -= 1;
                }
                let mat = cur; // K x K
                let vec: Vec<f64> = mat.chunks(k).map(|row| row.iter().zip(&u).map(|(a, b)| a * b).sum()).collect();
                let value: f64 = vec.iter().zip(&u).map(|(a, b)| a * b).sum();
                let pf = p as f64;
                let grad = (0..k).map(|j| pf * self.lambda[j] * vec[j]).collect();
                let hess = SymMatrix::from_fn(k, |a, b| pf * (pf - 1.0) * self.lambda[a] * self.lambda[b] * mat[a * k + b]);
                (value, grad, hess)
            }
        }
    }

    pub fn value(&self, beta: f64, t: &[f64]) -> f64 {
        let (poly, _, _) = self.poly_derivs(t);
        beta * poly - self.lambda.iter().zip(t).map(|(l, &x)| l * entropy_pt(Pt::from_t(x))).sum::<f64>()
    }

    fn gradient(&self, beta: f64, t: &[f64]) -> Vec<f64> {
        let (_, g, _) = self.poly_derivs(t);
        g.iter().zip(&self.lambda).zip(t).map(|((g, l), &x)| beta * g - l * x.atanh()).collect()
    }

    /// Ascends from `start`: damped fixed-point sweeps, then Newton on the
    /// gradient with projection into `[0, 1)`.
    fn ascend(&self, beta: f64, start: &[f64]) -> Vec<f64> {
        let k = self.k();
        let cap = 1.0 - f64::EPSILON;
        let mut t = start.to_vec();
        for _ in 0..200 {
            let (_, g, _) = self.poly_derivs(&t);
            let mut change: f64 = 0.0;
            for j in 0..k {
                let next = (beta * g[j] / self.lambda[j]).tanh().clamp(0.0, cap);
                let next = 0.5 * (t[j] + next);
                change = change.max((next - t[j]).abs());
                t[j] = next;
            }
            if change < 1e-14 {
                break;
            }
        }
        for _ in 0..60 {
            let (_, pg, ph) = self.poly_derivs(&t);
            let grad: Vec<f64> = (0..k).map(|j| beta * pg[j] - self.lambda[j] * t[j].atanh()).collect();
            if grad.iter().all(|g| g.abs() < 1e-15) {
                break;
            }
            let h = nalgebra::DMatrix::from_fn(k, k, |a, b| {
                let d = if a == b { self.lambda[a] / ((1.0 - t[a]) * (1.0 + t[a])) } else { 0.0 };
                beta * ph.get(a, b) - d
            });
            let rhs = nalgebra::DVector::from_iterator(k, grad.iter().map(|g| -g));
            let Some(step) = h.lu().solve(&rhs) else { break };
            let before = self.value(beta, &t);
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand: Vec<f64> = (0..k).map(|j| (t[j] + scale * step[j]).clamp(0.0, cap)).collect();
                if self.value(beta, &cand) >= before - 1e-16 {
                    t = cand;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        t
    }

    /// `sup_{[0,1]^K} phi_beta` by multi-start ascent from a `5^K` lattice.
    /// Ties keep the lowest seed index.
    pub fn sup(&self, beta: f64) -> (f64, Vec<f64>) {
        let k = self.k();
        let levels = [0.2, 0.4, 0.6, 0.8, 1.0 - 1e-9];
        let seeds = 5usize.pow(k as u32);
        let results: Vec<(f64, Vec<f64>)> = (0..seeds)
            .into_par_iter()
            .map(|idx| {
                let mut r = idx;
                let start: Vec<f64> = (0..k)
                    .map(|_| {
                        let l = levels[r % 5];
                        r /= 5;
                        l
                    })
                    .collect();
                let t = self.ascend(beta, &start);
                (self.value(beta, &t), t)
            })
            .collect();
        let mut best = (0.0, vec![0.0; k]);
        for (v, t) in results {
            if v > best.0 {
                best = (v, t);
            }
        }
        best
    }

    /// Largest eigenvalue of the Hessian of `phi_beta` at the origin; only
    /// quadratic polynomials contribute there.
    fn origin_curvature(&self, beta: f64) -> Result<f64> {
        let k = self.k();
        let zero = vec![0.0; k];
        let (_, _, ph) = self.poly_derivs(&zero);
        let h = SymMatrix::from_fn(k, |a, b| beta * ph.get(a, b) - if a == b { self.lambda[a] } else { 0.0 });
        Ok(extreme_eigenvalues(&h)?.1)
    }

    fn supercritical(&self, beta: f64) -> Result<bool> {
        if self.is_quadratic() && self.origin_curvature(beta)? > 0.0 {
            return Ok(true);
        }
        Ok(self.sup(beta).0 > 1e-14)
    }

    fn is_quadratic(&self) -> bool {
        match &self.poly {
            BlockPoly::Dense(t) => t.order() == 2,
            BlockPoly::Product(_) => self.k() == 2,
        }
    }

    /// Threshold by bisection on `beta` to absolute width `tol`.
    pub fn threshold(&self, tol: f64) -> Result<ThresholdResult> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let mut hi = 1.0;
        while !self.supercritical(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Numerical("no supercritical beta below 1e12".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.supercritical(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (_, profile) = self.sup(hi);
        let grad = self.gradient(hi, &profile);
        Ok(ThresholdResult {
            beta_star: 0.5 * (lo + hi),
            argmax_profile: profile,
            tol_beta: hi - lo,
            tol_inner: grad.iter().fold(0.0, |m, g| m.max(g.abs())),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub beta_star: f64,
    /// Maximising profile of the functional just above the threshold.
    pub argmax_profile: Vec<f64>,
    pub tol_beta: f64,
    /// Largest gradient component at the reported profile.
    pub tol_inner: f64,
}

pub const HSBM_BETA_TOL: f64 = 1e-5;

pub fn beta_star_hsbm(lambda: &[f64], theta: &BlockTensor) -> Result<ThresholdResult> {
    BlockFunctional::hsbm(lambda, theta)?.threshold(HSBM_BETA_TOL)
}

/// Threshold of the product functional `beta theta prod lambda_j t_j - sum lambda_j I(t_j)`.
///
/// The functional carries no `p!` for the orderings of a p-partite edge,
/// so for tensors built by `models::p_partite` the block-model threshold
/// is this value divided by `p!`.
pub fn beta_star_partite(lambda: &[f64], theta: f64) -> Result<f64> {
    Ok(BlockFunctional::partite(lambda, theta)?.threshold(HSBM_BETA_TOL)?.beta_star)
}

/// `sup phi_beta` for a block model.
pub fn sup_phi_hsbm(lambda: &[f64], theta: &BlockTensor, beta: f64) -> Result<(f64, Vec<f64>)> {
    Ok(BlockFunctional::hsbm(lambda, theta)?.sup(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fixed_point_mstar(beta: f64, p: usize) -> f64 {
        let mut m: f64 = 1.0;
        for _ in 0..100_000 {
            m = (beta * p as f64 * m.powi(p as i32 - 1)).tanh();
        }
        m
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(1.0).unwrap(), LN2, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_entropy(-1.0).unwrap(), LN2, epsilon = 1e-15);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 0.130812036, epsilon = 1e-7);
        assert!(binary_entropy(1.5).is_err());
        // series and closed form agree at the switch
        let a = entropy_pt(Pt::from_t(0.00999999));
        let t: f64 = 0.00999999;
        let b = 0.5 * ((1.0 + t) * t.ln_1p() + (1.0 - t) * (-t).ln_1p());
        assert_abs_diff_eq!(a, b, epsilon = 1e-17);
    }

    #[test]
    fn m_star_cases() {
        assert_eq!(m_star(0.49, 2).unwrap(), None);
        let m = m_star(1.0, 2).unwrap().unwrap();
        assert_abs_diff_eq!(m, fixed_point_mstar(1.0, 2), epsilon = 1e-10);
        assert_abs_diff_eq!(g_second(0.5, 2, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        let c = FreeEnergyCurve::new(0.9, 3).unwrap();
        let m = c.m_star.unwrap();
        assert!(g_first(0.9, 3, m).unwrap().abs() <= 1e-12);
        assert!(c.g2_at_mstar.unwrap() < 0.0);
        assert_abs_diff_eq!(m, fixed_point_mstar(0.9, 3), epsilon = 1e-10);
    }

    #[test]
    fn cw_thresholds() {
        assert_abs_diff_eq!(beta_star_cw(2).unwrap(), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(beta_star_cw(3).unwrap(), 0.672084786033523, epsilon = 1e-10);
        assert_abs_diff_eq!(beta_star_cw(4).unwrap(), 0.688801373948791, epsilon = 1e-10);
        assert_abs_diff_eq!(beta_star_er(3, 0.5).unwrap(), 2.0 * beta_star_cw(3).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn alpha_values() {
        assert_abs_diff_eq!(alpha_weight(3).unwrap(), 0.43916, epsilon = 1e-4);
        assert_abs_diff_eq!(alpha_weight(4).unwrap(), 0.31532, epsilon = 1e-4);
        for p in 3..=6 {
            let a = alpha_weight(p).unwrap();
            assert!(a > 0.0 && a < 1.0);
        }
    }

    #[test]
    fn variance_and_information_are_reciprocal() {
        let v = asymptotic_variance(0.75, 4).unwrap();
        let f = fisher_info_limit(0.75, 4).unwrap();
        assert_abs_diff_eq!(v * f, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 5.3655, epsilon = 1e-3);
        assert!(asymptotic_variance(0.6, 3).is_err());
    }

    #[test]
    fn limit_cdf_shape() {
        assert_eq!(threshold_limit_cdf_p2(-1.0), 0.0);
        assert_abs_diff_eq!(threshold_limit_cdf_p2(1e3), 1.0, epsilon = 1e-10);
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if threshold_limit_cdf_p2(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // independent check of the median with a fine uniform Simpson rule
        let median = 0.5 * (lo + hi);
        let simpson = |b: f64, n: usize| {
            let h = b / n as f64;
            let f = |s: f64| (-s.powi(4) / 12.0).exp();
            (0..=n).map(|i| f(i as f64 * h) * if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }).sum::<f64>() * h / 3.0
        };
        let total = simpson(12.0, 400_000);
        let half = simpson((6.0 * median).sqrt(), 200_000);
        assert_abs_diff_eq!(half / total, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn block_reductions() {
        let th = BlockTensor::constant(1, 3, 1.0).unwrap();
        let r = beta_star_hsbm(&[1.0], &th).unwrap();
        assert_abs_diff_eq!(r.beta_star, beta_star_cw(3).unwrap(), epsilon = 2e-5);
        let th = BlockTensor::constant(2, 3, 0.5).unwrap();
        let r = beta_star_hsbm(&[0.5, 0.5], &th).unwrap();
        assert!((r.beta_star / beta_star_er(3, 0.5).unwrap() - 1.0).abs() < 1e-4);
        assert!(r.argmax_profile.iter().all(|&t| t > 0.5));
        let two = beta_star_partite(&[0.5, 0.5], 1.0).unwrap();
        assert!((two / 2.0 - 1.0).abs() < 1e-4);
        assert!(BlockFunctional::hsbm(&[1.0 / 7.0; 7], &BlockTensor::constant(7, 2, 0.5).unwrap()).is_err());
    }
}
