//! Samplers for `P(x) ∝ exp(beta H(x))`.
//!
//! Glauber (heat-bath) dynamics works for any tensor. Curie–Weiss models are
//! sampled exactly through the law of the number of up spins, and tiny
//! systems can be sampled exactly by enumeration.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::combinatorics::ln_binomial;
use crate::error::{Error, Result};
use crate::oracle::{log_sum_exp, ENUMERATION_LIMIT};
use crate::rng::{stream_rng, Purpose, StreamRng};
use crate::spin::SpinConfig;
use crate::tensor::InteractionTensor;

pub const DEFAULT_BURN_IN: usize = 200;
pub const DEFAULT_THIN: usize = 1;
pub const DEFAULT_REFRESH: usize = 1000;
/// Exact Curie–Weiss sampling guard on `N`.
pub const MAX_CW_N: usize = 10_000_000;
/// Largest `N` routed to the enumeration sampler.
pub const MAX_ENUMERATION_SAMPLER_N: usize = 20;

/// A single Glauber chain. Sparse tensors cache all local fields; the
/// Curie–Weiss path caches the spin sum instead.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub x: SpinConfig,
    cached_fields: Vec<f64>,
    spin_sum: i64,
    pub sweep_count: usize,
    /// Sweeps between full recomputations of the cache.
    pub refresh_every: usize,
    /// Largest cache error seen at a refresh.
    pub max_drift: f64,
    order: Vec<usize>,
    rng: StreamRng,
}

impl ChainState {
    pub fn new(tensor: &InteractionTensor, x: SpinConfig, rng: StreamRng) -> Result<Self> {
        let cached_fields = if tensor.is_curie_weiss() { Vec::new() } else { tensor.all_local_fields(&x)? };
        let spin_sum = x.sum();
        let n = x.n();
        Ok(Self {
            x,
            cached_fields,
            spin_sum,
            sweep_count: 0,
            refresh_every: DEFAULT_REFRESH,
            max_drift: 0.0,
            order: (0..n).collect(),
            rng,
        })
    }

    /// Chain started from i.i.d. uniform spins drawn from its own stream.
    pub fn random_start(tensor: &InteractionTensor, seed: u64, chain: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, Purpose::Chain, chain);
        let spins = (0..tensor.n()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        Self::new(tensor, SpinConfig::new(spins)?, rng)
    }

    pub fn cached_fields(&self) -> &[f64] {
        &self.cached_fields
    }

    /// Recomputes the cache and records the drift.
    pub fn refresh(&mut self, tensor: &InteractionTensor) -> Result<()> {
        if tensor.is_curie_weiss() {
            let fresh = self.x.sum();
            self.max_drift = self.max_drift.max((fresh - self.spin_sum).abs() as f64);
            self.spin_sum = fresh;
        } else {
            let fresh = tensor.all_local_fields(&self.x)?;
            let drift = fresh.iter().zip(&self.cached_fields).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            self.max_drift = self.max_drift.max(drift);
            self.cached_fields = fresh;
        }
        Ok(())
    }
}

/// `1 / (1 + e^{-z})` without overflow.
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// One sweep: `N` heat-bath updates in a fresh uniformly random order.
pub fn glauber_sweep(state: &mut ChainState, tensor: &InteractionTensor, beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be finite and nonnegative")));
    }
    let n = tensor.n();
    if state.x.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: state.x.n() });
    }
    let p = tensor.order();
    let mut order = std::mem::take(&mut state.order);
    order.shuffle(&mut state.rng);
    if tensor.is_curie_weiss() {
        let nf = n as f64;
        let mut spins = state.x.spins().to_vec();
        for &i in &order {
            let rest = state.spin_sum - spins[i] as i64;
            let h_up = nf * ((rest + 1) as f64 / nf).powi(p as i32);
            let h_down = nf * ((rest - 1) as f64 / nf).powi(p as i32);
            let up = state.rng.random::<f64>() < logistic(beta * (h_up - h_down));
            let new = if up { 1 } else { -1 };
            state.spin_sum = rest + new as i64;
            spins[i] = new;
        }
        state.x = SpinConfig::new(spins)?;
    } else {
        let mut spins = state.x.spins().to_vec();
        let pb = 2.0 * p as f64 * beta;
        for &i in &order {
            let m = state.cached_fields[i];
            if !m.is_finite() {
                return Err(Error::NonFinite(format!("local field at site {i}")));
            }
            let up = state.rng.random::<f64>() < logistic(pb * m);
            if up != (spins[i] == 1) {
                tensor.apply_flip(&mut spins, &mut state.cached_fields, i);
            }
        }
        state.x = SpinConfig::new(spins)?;
    }
    state.order = order;
    state.sweep_count += 1;
    if state.refresh_every > 0 && state.sweep_count.is_multiple_of(state.refresh_every) {
        state.refresh(tensor)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Exact sampler for Curie–Weiss, Glauber otherwise.
    #[default]
    Auto,
    Glauber,
    Enumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    /// Sweeps discarded before the first draw.
    pub burn_in: usize,
    /// Sweeps between consecutive draws, at least 1.
    pub thin: usize,
    pub route: Route,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { burn_in: DEFAULT_BURN_IN, thin: DEFAULT_THIN, route: Route::Auto }
    }
}

/// Draws `n_samples` configurations; chain `chain` of `seed` is used for
/// Glauber, so different chain indices give independent runs.
pub fn sample(
    tensor: &InteractionTensor,
    beta: f64,
    n_samples: usize,
    schedule: Schedule,
    seed: u64,
    chain: u64,
) -> Result<Vec<SpinConfig>> {
    if schedule.thin == 0 {
        return Err(Error::InvalidArgument("thin must be at least 1".into()));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be finite and nonnegative")));
    }
    match schedule.route {
        Route::Auto if tensor.is_curie_weiss() => {
            let sampler = CwLevelSampler::new(tensor.order(), tensor.n(), beta)?;
            let mut rng = stream_rng(seed, Purpose::Chain, chain);
            Ok((0..n_samples).map(|_| sampler.draw_config(&mut rng)).collect())
        }
        Route::Enumeration => {
            let sampler = EnumerationSampler::new(tensor, beta)?;
            let mut rng = stream_rng(seed, Purpose::Enumeration, chain);
            Ok((0..n_samples).map(|_| sampler.draw(&mut rng)).collect())
        }
        _ => {
            let mut state = ChainState::random_start(tensor, seed, chain)?;
            for _ in 0..schedule.burn_in {
                glauber_sweep(&mut state, tensor, beta)?;
            }
            let mut out = Vec::with_capacity(n_samples);
            for _ in 0..n_samples {
                for _ in 0..schedule.thin {
                    glauber_sweep(&mut state, tensor, beta)?;
                }
                out.push(state.x.clone());
            }
            Ok(out)
        }
    }
}

/// Log-weights `ln C(N,k) + beta N (2k/N - 1)^p` of the up-spin count `k`.
pub fn cw_level_log_weights(p: usize, n: usize, beta: f64) -> Result<Vec<f64>> {
    if p < 2 || n < p {
        return Err(Error::InvalidModel(format!("need p >= 2 and n >= p (p = {p}, n = {n})")));
    }
    if n > MAX_CW_N {
        return Err(Error::Guard { what: "Curie-Weiss N", value: n as u128, limit: MAX_CW_N as u128 });
    }
    let nf = n as f64;
    Ok((0..=n)
        .map(|k| ln_binomial(n as u64, k as u64) + beta * nf * ((2 * k) as f64 / nf - 1.0).powi(p as i32))
        .collect())
}

/// Exact sampler for the Curie–Weiss up-spin count by inverse CDF.
#[derive(Debug, Clone)]
pub struct CwLevelSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl CwLevelSampler {
    pub fn new(p: usize, n: usize, beta: f64) -> Result<Self> {
        let logw = cw_level_log_weights(p, n, beta)?;
        Ok(Self { n, cdf: cumulative(&logw) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pmf(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    /// Number of up spins.
    pub fn draw_level(&self, rng: &mut StreamRng) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.n)
    }

    /// Configuration with a uniformly random set of `k` up sites.
    pub fn draw_config(&self, rng: &mut StreamRng) -> SpinConfig {
        let k = self.draw_level(rng);
        let mut spins = vec![-1i8; self.n];
        for i in rand::seq::index::sample(rng, self.n, k) {
            spins[i] = 1;
        }
        SpinConfig::new(spins).expect("nonempty")
    }
}

fn cumulative(logw: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(logw);
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = logw
        .iter()
        .map(|&l| {
            acc += (l - z).exp();
            acc
        })
        .collect();
    let total = *cdf.last().unwrap();
    cdf.iter_mut().for_each(|c| *c /= total);
    *cdf.last_mut().unwrap() = 1.0;
    cdf
}

/// `count` exact Curie–Weiss draws.
pub fn exact_cw_sample(p: usize, n: usize, beta: f64, count: usize, seed: u64) -> Result<Vec<SpinConfig>> {
    let sampler = CwLevelSampler::new(p, n, beta)?;
    let mut rng = stream_rng(seed, Purpose::Chain, 0);
    Ok((0..count).map(|_| sampler.draw_config(&mut rng)).collect())
}

/// Exact sampler over all `2^N` configurations.
#[derive(Debug, Clone)]
pub struct EnumerationSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl EnumerationSampler {
    pub fn new(tensor: &InteractionTensor, beta: f64) -> Result<Self> {
        let n = tensor.n();
        if n > MAX_ENUMERATION_SAMPLER_N.min(ENUMERATION_LIMIT) {
            return Err(Error::Guard { what: "enumeration sampler N", value: n as u128, limit: MAX_ENUMERATION_SAMPLER_N as u128 });
        }
        let h = crate::oracle::hamiltonian_table(tensor)?;
        let logw: Vec<f64> = h.iter().map(|&v| beta * v).collect();
        Ok(Self { n, cdf: cumulative(&logw) })
    }

    /// Configuration index (bit `i` set means site `i` is up).
    pub fn draw_index(&self, rng: &mut StreamRng) -> u64 {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) as u64
    }

    pub fn draw(&self, rng: &mut StreamRng) -> SpinConfig {
        SpinConfig::from_bits(self.draw_index(rng), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_stays_exact() {
        let t = crate::models::sk(3, 14, 4).unwrap();
        let mut st = ChainState::random_start(&t, 1, 0).unwrap();
        st.refresh_every = 0;
        for _ in 0..300 {
            glauber_sweep(&mut st, &t, 1.3).unwrap();
        }
        let fresh = t.all_local_fields(&st.x).unwrap();
        for (a, b) in fresh.iter().zip(st.cached_fields()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn strong_pair_aligns() {
        let t = InteractionTensor::from_edges(2, 10, vec![(vec![0, 1], 1.0)]).unwrap();
        let xs = sample(&t, 5.0, 2000, Schedule::default(), 3, 0).unwrap();
        let agree = xs.iter().filter(|x| x.spins()[0] == x.spins()[1]).count();
        assert!(agree as f64 >= 0.99 * xs.len() as f64);
    }

    #[test]
    fn deterministic_replays() {
        let t = crate::models::erdos_renyi(3, 12, 1.0, 0).unwrap();
        let a = sample(&t, 0.4, 20, Schedule::default(), 9, 2).unwrap();
        assert_eq!(a, sample(&t, 0.4, 20, Schedule::default(), 9, 2).unwrap());
        assert!(sample(&t, 0.4, 1, Schedule { thin: 0, ..Default::default() }, 9, 2).is_err());
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let t = InteractionTensor::curie_weiss(2, 50).unwrap();
        let mut st = ChainState::random_start(&t, 5, 0).unwrap();
        let mut means = Vec::new();
        for _ in 0..10_000 {
            glauber_sweep(&mut st, &t, 0.0).unwrap();
            means.push(st.x.mean());
        }
        let m = crate::stats::mean(&means);
        // sweeps at beta = 0 are independent, var(mean) = 1/N
        assert!(m.abs() < 3.0 * (1.0 / 50.0 / 10_000.0f64).sqrt());
    }

    #[test]
    fn cw_high_temperature_mean() {
        let xs = exact_cw_sample(2, 500, 0.25, 4000, 1).unwrap();
        let means: Vec<f64> = xs.iter().map(|x| x.mean()).collect();
        let m = crate::stats::mean(&means);
        let sd = crate::stats::variance(&means).sqrt();
        assert!(m.abs() < 3.0 * sd / (means.len() as f64).sqrt());
        assert!(xs.iter().all(|x| x.n() == 500));
    }
}
