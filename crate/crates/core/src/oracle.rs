//! Exact reference computations at oracle scale.
//!
//! Everything here is either brute-force enumeration over `{-1,+1}^N` or a
//! collapse onto magnetisation levels. Summation is in the log domain with a
//! fixed reduction order, so results are bit-reproducible across thread
//! counts.

use rayon::prelude::*;

use crate::combinatorics::{ln_binomial, set_partitions};
use crate::error::{Error, Result};
use crate::landscape::sup_phi_hsbm;
use crate::models::{BlockStructure, BlockTensor};
use crate::mple::{phi_p, FieldProfile, DEFAULT_B_MAX, DEFAULT_TOL};
use crate::sampler::cw_level_log_weights;
use crate::spin::SpinConfig;
use crate::tensor::InteractionTensor;

/// Largest `N` for `2^N` enumeration.
pub const ENUMERATION_LIMIT: usize = 22;
/// Largest `N` for the enumerated MPL sampling distribution.
pub const MPLE_ENUMERATION_LIMIT: usize = 18;
pub const MAX_MAGNETIZATION_N: usize = 1_000_000;
pub const MAX_BLOCK_LATTICE: u128 = 100_000_000;
pub const MAX_AVERAGED_BLOCKS: usize = 4;
const CHUNK_BITS: u32 = 12;

/// `ln sum exp(x_i)` by pairwise reduction after a max shift.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    fn pairwise(xs: &[f64], m: f64) -> f64 {
        if xs.len() <= 16 {
            return xs.iter().map(|x| (x - m).exp()).sum();
        }
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise(a, m) + pairwise(b, m)
    }
    m + pairwise(xs, m).ln()
}

fn enumeration_guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Guard { what: "enumeration N", value: n as u128, limit: limit as u128 });
    }
    Ok(())
}

/// `H(x)` for all `2^N` configurations; index bit `i` set means site `i` is up.
pub fn hamiltonian_table(tensor: &InteractionTensor) -> Result<Vec<f64>> {
    let n = tensor.n();
    enumeration_guard(n, ENUMERATION_LIMIT)?;
    let total = 1usize << n;
    if tensor.is_curie_weiss() {
        let p = tensor.order() as i32;
        let by_level: Vec<f64> = (0..=n).map(|k| n as f64 * ((2 * k) as f64 / n as f64 - 1.0).powi(p)).collect();
        return Ok((0..total).into_par_iter().map(|idx| by_level[(idx as u64).count_ones() as usize]).collect());
    }
    let chunk = 1usize << CHUNK_BITS.min(n as u32);
    let tables: Vec<Vec<f64>> = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let x = SpinConfig::from_bits(start as u64, n);
            let mut h = tensor.hamiltonian(&x).expect("dimensions checked");
            let mut fields = tensor.all_local_fields(&x).expect("dimensions checked");
            let mut spins = x.spins().to_vec();
            let mut out = Vec::with_capacity(chunk);
            out.push(h);
            for idx in start..start + chunk - 1 {
                // idx -> idx + 1 clears the trailing ones and sets the next bit
                let flips = (idx.trailing_ones() + 1) as usize;
                for i in 0..flips {
                    h += tensor.apply_flip(&mut spins, &mut fields, i);
                }
                out.push(h);
            }
            out
        })
        .collect();
    Ok(tables.concat())
}

/// `F_N(beta) = ln(2^{-N} sum_x exp(beta H(x)))`.
pub fn exact_log_partition(tensor: &InteractionTensor, beta: f64) -> Result<f64> {
    let h = hamiltonian_table(tensor)?;
    Ok(log_partition_from_table(&h, beta, tensor.n()))
}

fn log_partition_from_table(h: &[f64], beta: f64, n: usize) -> f64 {
    let lw: Vec<f64> = h.iter().map(|&v| beta * v).collect();
    log_sum_exp(&lw) - n as f64 * std::f64::consts::LN_2
}

/// `E_beta H = F_N'(beta)`.
pub fn mean_hamiltonian(tensor: &InteractionTensor, beta: f64) -> Result<f64> {
    let h = hamiltonian_table(tensor)?;
    Ok(mean_from_table(&h, beta))
}

fn mean_from_table(h: &[f64], beta: f64) -> f64 {
    let lw: Vec<f64> = h.iter().map(|&v| beta * v).collect();
    let z = log_sum_exp(&lw);
    h.iter().zip(&lw).map(|(v, l)| v * (l - z).exp()).sum()
}

/// `D(Q_{beta1} || Q_{beta2}) = F(beta2) - F(beta1) - (beta2 - beta1) F'(beta1)`,
/// clipped at 0 against rounding.
pub fn kl_divergence(tensor: &InteractionTensor, beta1: f64, beta2: f64) -> Result<f64> {
    if !(beta1 >= 0.0 && beta2 >= 0.0) {
        return Err(Error::InvalidArgument("inverse temperatures must be nonnegative".into()));
    }
    let h = hamiltonian_table(tensor)?;
    let n = tensor.n();
    let d = log_partition_from_table(&h, beta2, n) - log_partition_from_table(&h, beta1, n) - (beta2 - beta1) * mean_from_table(&h, beta1);
    Ok(d.max(0.0))
}

/// A discrete law given by unnormalised log-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub support: Vec<f64>,
    pub log_weights: Vec<f64>,
    pub normalized: bool,
}

impl ExactDistribution {
    pub fn new(support: Vec<f64>, log_weights: Vec<f64>) -> Self {
        assert_eq!(support.len(), log_weights.len());
        Self { support, log_weights, normalized: false }
    }

    pub fn log_normalizer(&self) -> f64 {
        log_sum_exp(&self.log_weights)
    }

    pub fn normalize(mut self) -> Self {
        let z = self.log_normalizer();
        self.log_weights.iter_mut().for_each(|l| *l -= z);
        self.normalized = true;
        self
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let z = if self.normalized { 0.0 } else { self.log_normalizer() };
        self.log_weights.iter().map(|l| (l - z).exp()).collect()
    }

    pub fn mass_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.support.iter().zip(self.probabilities()).filter(|(v, _)| pred(**v)).map(|(_, p)| p).sum()
    }

    /// Expectation of `f` over the support; must be finite on atoms with mass.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.support.iter().zip(self.probabilities()).filter(|(_, p)| *p > 0.0).map(|(v, p)| f(*v) * p).sum()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.mass_where(|v| v <= t)
    }

    /// Merges atoms with identical values and sorts the support.
    fn merged(support: Vec<f64>, log_weights: Vec<f64>) -> Self {
        let mut pairs: Vec<(f64, f64)> = support.into_iter().zip(log_weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut sup = Vec::new();
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for (v, l) in pairs {
            if sup.last() == Some(&v) {
                groups.last_mut().unwrap().push(l);
            } else {
                sup.push(v);
                groups.push(vec![l]);
            }
        }
        let lw = groups.iter().map(|g| log_sum_exp(g)).collect();
        Self::new(sup, lw)
    }
}

/// Law of the Curie–Weiss mean spin, normalised.
pub fn exact_magnetization_pmf(p: usize, n: usize, beta: f64) -> Result<ExactDistribution> {
    if n > MAX_MAGNETIZATION_N {
        return Err(Error::Guard { what: "magnetization pmf N", value: n as u128, limit: MAX_MAGNETIZATION_N as u128 });
    }
    let lw = cw_level_log_weights(p, n, beta)?;
    let support = (0..=n).map(|k| (2 * k) as f64 / n as f64 - 1.0).collect();
    Ok(ExactDistribution::new(support, lw).normalize())
}

/// Law of the mean spin under any tensor, by enumeration.
pub fn enumerated_magnetization_pmf(tensor: &InteractionTensor, beta: f64) -> Result<ExactDistribution> {
    let n = tensor.n();
    let h = hamiltonian_table(tensor)?;
    let mut per_level: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    for (idx, v) in h.iter().enumerate() {
        per_level[(idx as u64).count_ones() as usize].push(beta * v);
    }
    let support = (0..=n).map(|k| (2 * k) as f64 / n as f64 - 1.0).collect();
    let lw = per_level.iter().map(|l| log_sum_exp(l)).collect();
    Ok(ExactDistribution::new(support, lw).normalize())
}

/// Sampling law of the MPL estimate, with `+inf` as an explicit atom.
///
/// Curie–Weiss tensors use the mean-spin law pushed through the closed
/// form, at any `N`; other tensors enumerate all configurations.
pub fn exact_mple_distribution(tensor: &InteractionTensor, beta: f64) -> Result<ExactDistribution> {
    let n = tensor.n();
    let p = tensor.order();
    if tensor.is_curie_weiss() {
        let pmf = exact_magnetization_pmf(p, n, beta)?;
        let values = pmf.support.iter().map(|&t| phi_p(t, p)).collect::<Result<Vec<_>>>()?;
        return Ok(ExactDistribution::merged(values, pmf.log_weights).normalize());
    }
    enumeration_guard(n, MPLE_ENUMERATION_LIMIT)?;
    let h = hamiltonian_table(tensor)?;
    let values: Vec<f64> = (0..1usize << n)
        .into_par_iter()
        .map(|idx| {
            let x = SpinConfig::from_bits(idx as u64, n);
            let prof = FieldProfile::new(tensor, &x).expect("dimensions checked");
            prof.estimate(DEFAULT_TOL, DEFAULT_B_MAX).beta_hat
        })
        .collect();
    let lw = h.iter().map(|&v| beta * v).collect();
    Ok(ExactDistribution::merged(values, lw).normalize())
}

/// Averaged block-model log-partition functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedHsbm {
    /// With `H = N^{1-p} sum_j Theta_j prod_l S_{j_l}`, diagonal tuples included.
    pub log_partition: f64,
    /// With the expected zero-diagonal tensor `E J`.
    pub offdiagonal_log_partition: f64,
    /// `log_partition - offdiagonal_log_partition`.
    pub diagonal_correction: f64,
}

/// Exact log-partition of the averaged block model, summed over the lattice
/// of block magnetisations with multiplicities `prod_j C(|B_j|, k_j)`.
pub fn averaged_hsbm_log_partition(p: usize, n: usize, lambda: &[f64], theta: &BlockTensor, beta: f64) -> Result<AveragedHsbm> {
    if theta.order() != p || theta.k() != lambda.len() {
        return Err(Error::InvalidModel("block tensor shape does not match (K, p)".into()));
    }
    let k = lambda.len();
    if k > MAX_AVERAGED_BLOCKS {
        return Err(Error::Guard { what: "averaged model K", value: k as u128, limit: MAX_AVERAGED_BLOCKS as u128 });
    }
    let blocks = BlockStructure::from_proportions(n, lambda)?;
    let sizes = &blocks.block_sizes;
    let lattice: u128 = sizes.iter().map(|&s| s as u128 + 1).product();
    if lattice > MAX_BLOCK_LATTICE {
        return Err(Error::Guard { what: "block lattice size", value: lattice, limit: MAX_BLOCK_LATTICE });
    }
    let scale = (n as f64).powi(1 - p as i32);
    let partitions = set_partitions(p);
    let mobius: Vec<f64> = partitions
        .iter()
        .map(|pi| pi.iter().map(|b| if b.len() % 2 == 1 { 1.0 } else { -1.0 } * crate::combinatorics::factorial(b.len() - 1)).product())
        .collect();
    let ln_binoms: Vec<Vec<f64>> = sizes.iter().map(|&s| (0..=s).map(|j| ln_binomial(s as u64, j as u64)).collect()).collect();

    let mut labels = vec![0usize; p];
    let tuples: Vec<(Vec<usize>, f64)> = (0..theta.values().len())
        .filter_map(|idx| {
            theta.decode(idx, &mut labels);
            let v = theta.values()[idx];
            (v != 0.0).then(|| (labels.clone(), v))
        })
        .collect();

    let hamiltonians = |levels: &[usize]| -> (f64, f64) {
        let s: Vec<f64> = levels.iter().zip(sizes).map(|(&kj, &bj)| (2 * kj) as f64 - bj as f64).collect();
        let mut full = 0.0;
        let mut off = 0.0;
        for (lab, th) in &tuples {
            full += th * lab.iter().map(|&j| s[j]).product::<f64>();
            // sum over distinct index tuples by inversion over set partitions
            let mut distinct = 0.0;
            for (pi, mu) in partitions.iter().zip(&mobius) {
                let mut prod = *mu;
                for b in pi {
                    let j = lab[b[0]];
                    if b.iter().any(|&pos| lab[pos] != j) {
                        prod = 0.0;
                        break;
                    }
                    prod *= if b.len() % 2 == 1 { s[j] } else { sizes[j] as f64 };
                }
                distinct += prod;
            }
            off += th * distinct;
        }
        (scale * full, scale * off)
    };

    let total = lattice as u64;
    let chunk = 4096u64;
    let parts: Vec<(f64, f64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut full = Vec::new();
            let mut off = Vec::new();
            let mut levels = vec![0usize; k];
            for r in c * chunk..((c + 1) * chunk).min(total) {
                let mut rem = r;
                for j in (0..k).rev() {
                    levels[j] = (rem % (sizes[j] as u64 + 1)) as usize;
                    rem /= sizes[j] as u64 + 1;
                }
                let mult: f64 = levels.iter().enumerate().map(|(j, &kj)| ln_binoms[j][kj]).sum();
                let (hf, ho) = hamiltonians(&levels);
                full.push(mult + beta * hf);
                off.push(mult + beta * ho);
            }
            (log_sum_exp(&full), log_sum_exp(&off))
        })
        .collect();
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let full = log_sum_exp(&parts.iter().map(|p| p.0).collect::<Vec<_>>()) - ln2n;
    let off = log_sum_exp(&parts.iter().map(|p| p.1).collect::<Vec<_>>()) - ln2n;
    Ok(AveragedHsbm { log_partition: full, offdiagonal_log_partition: off, diagonal_correction: full - off })
}

/// `N sup phi_beta`, the mean-field lower bound on the expected log-partition.
pub fn meanfield_lower_bound(n: usize, lambda: &[f64], theta: &BlockTensor, beta: f64) -> Result<f64> {
    Ok(n as f64 * sup_phi_hsbm(lambda, theta, beta)?.0)
}
